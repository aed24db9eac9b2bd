#include "teachcert/verify.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "parallel.hpp"
#include "teachcert/errors.hpp"

namespace teachcert {

std::string to_string(VerifyMode m) {
  switch (m) {
    case VerifyMode::Arbitrary: return "arbitrary";
    case VerifyMode::PerExample: return "per-example";
    case VerifyMode::Policy: return "policy";
  }
  return "?";
}

std::string to_string(Outcome o) { return o == Outcome::Verified ? "verified" : "unknown"; }

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::Monolithic: return "monolithic";
    case CertificateKind::PerExample: return "per-example";
    case CertificateKind::PerPartition: return "per-partition";
  }
  return "?";
}

Rational barrier_value(const Poly& barrier, unsigned t, const RationalVector& b) {
  RationalVector point = b;
  point.emplace_back(t);
  return barrier.eval(point);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Matching rows of one DSOS constraint of degree D over n belief variables.
std::size_t constraint_rows(std::size_t n, unsigned D, bool homogeneous) {
  const std::size_t monos = homogeneous ? binomial(n + D - 1, D) : binomial(n + D, D);
  const std::size_t basis = homogeneous ? binomial(n + D / 2 - 1, D / 2) : binomial(n + D / 2, D / 2);
  return monos + (basis > 1 ? basis : 0);
}

// Row count of build_program(spec) computed without building any template.
std::size_t estimate_rows(const LearningPomdp& pomdp, unsigned t_star, unsigned d, const ProgramOptions& options,
                          const ProgramSpec& spec) {
  const std::size_t n = pomdp.num_hypotheses();
  const bool localized = options.localized();
  std::size_t rows = constraint_rows(n, d, localized) + 1;
  for (const auto& mode : spec.modes)
    for (std::size_t y = 0; y < pomdp.num_observations(); ++y) {
      const auto forms = linear_forms(pomdp, mode.example, y);
      if (forms.vacuous()) continue;
      const bool uniform = std::all_of(forms.R.begin(), forms.R.end(), [&](const Rational& r) { return r == forms.R[0]; });
      const unsigned D = localized && uniform ? d : 2 * d;
      rows += t_star * constraint_rows(n, D, localized);
    }
  return rows;
}

bool linear_holds(const Rational& v, lp::RowSense sense) {
  switch (sense) {
    case lp::RowSense::Eq: return v == 0;
    case lp::RowSense::Ge: return v >= 0;
    case lp::RowSense::Le: return v <= 0;
  }
  return false;
}

// Exact check of every condition of `prog` at `x`; failures are appended.
void check_program(const DsosProgram& prog, const RationalVector& x, std::vector<std::string>& failures) {
  if (x.size() != prog.vars.size()) {
    failures.push_back(prog.name + ": assignment has " + std::to_string(x.size()) + " values for " +
                       std::to_string(prog.vars.size()) + " variables");
    return;
  }
  auto value = [&](VarId v) { return x[static_cast<std::size_t>(v)]; };
  for (std::size_t v = 0; v < x.size(); ++v)
    if (prog.vars.all()[v].nonneg && x[v] < 0)
      failures.push_back(prog.name + ": negative value for " + prog.vars.all()[v].name);
  for (const auto& c : prog.constraints) {
    const Poly target = c.target.instantiate(value);
    const GramValues g = recover_gram(c, x);
    if (gram_polynomial(c, g) != target) failures.push_back(prog.name + ": " + c.name + " Gram identity");
    if (!diagonally_dominant(g)) failures.push_back(prog.name + ": " + c.name + " diagonal dominance");
  }
  for (const auto& l : prog.linear)
    if (!linear_holds(l.expr.eval(value), l.sense)) failures.push_back(prog.name + ": " + l.name);
}

struct Solved {
  ProgramDiagnostic diag;
  std::optional<ProgramRecord> record;
  bool ok() const { return record.has_value(); }
};

Solved solve_program(DsosProgram prog, const VerifyOptions& opt) {
  const auto start = Clock::now();
  Solved out;
  out.diag.program = prog.name;
  out.diag.decrease_constraints = prog.decrease_constraints;
  out.diag.vacuous_constraints = prog.vacuous_constraints;
  out.diag.columns = prog.vars.size();
  out.diag.rows = prog.estimated_rows();
  if (out.diag.rows > opt.row_budget) {
    out.diag.status = "skipped";
    out.diag.log.push_back("estimated " + std::to_string(out.diag.rows) + " rows exceed the budget of " +
                           std::to_string(opt.row_budget));
    out.diag.seconds = seconds_since(start);
    return out;
  }
  try {
    if (prog.vars.size() == 0) {
      // Nothing to solve: the conditions are constants.
      std::vector<std::string> failures;
      check_program(prog, {}, failures);
      out.diag.status = failures.empty() ? "feasible" : "infeasible";
      out.diag.audited = true;
      out.diag.audit_method = "exact";
      out.diag.log = failures;
      if (failures.empty()) out.record = ProgramRecord{std::move(prog), {}, "exact"};
    } else {
      const lp::Problem lp = prog.to_lp();
      out.diag.rows = lp.num_rows();
      lp::AuditedOptions ao = opt.lp;
      ao.exact = ao.exact || opt.exact_lp;
      auto res = lp::solve_audited(lp, ao);
      out.diag.status = lp::to_string(res.status);
      out.diag.audited = res.audited;
      out.diag.audit_method = res.audit.method;
      out.diag.log = std::move(res.log);
      if (res.status == lp::Status::Feasible && res.audited)
        out.record = ProgramRecord{std::move(prog), std::move(res.audit.assignment), res.audit.method};
    }
  } catch (const Error& e) {
    out.diag.status = "error";
    out.diag.log.push_back(e.what());
  }
  out.diag.seconds = seconds_since(start);
  return out;
}

std::vector<Solved> solve_all(std::vector<DsosProgram> programs, const VerifyOptions& opt) {
  std::vector<Solved> out(programs.size());
  detail::parallel_for(programs.size(), opt.jobs,
                       [&](std::size_t i) { out[i] = solve_program(std::move(programs[i]), opt); });
  return out;
}

Poly extract_barrier(const ProgramRecord& rec) {
  if (rec.program.certificates.size() != 1)
    throw InvariantViolation("program " + rec.program.name + " must carry exactly one certificate");
  return rec.program.certificates[0].poly.instantiate(
      [&](VarId v) { return rec.assignment.at(static_cast<std::size_t>(v)); });
}

ProgramOptions with_jobs(ProgramOptions p, unsigned jobs) {
  p.jobs = jobs;
  return p;
}

// Solves a spec whose budget is checked before any template is built.
Solved solve_spec(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star, unsigned d,
                  const VerifyOptions& opt, const ProgramSpec& spec) {
  const std::size_t estimate = estimate_rows(pomdp, t_star, d, opt.program, spec);
  if (!spec.fixed_certificate && estimate > opt.row_budget) {
    Solved out;
    out.diag.program = spec.name;
    out.diag.rows = estimate;
    out.diag.status = "skipped";
    out.diag.log.push_back("estimated " + std::to_string(estimate) + " rows exceed the budget of " +
                           std::to_string(opt.row_budget));
    return out;
  }
  return solve_program(build_program(pomdp, lambda, t_star, d, with_jobs(opt.program, opt.jobs), spec), opt);
}

// Fixed-barrier check of `barrier` against every mode; components solve independently.
std::optional<CompositionRecord> compose(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star,
                                         unsigned d, const VerifyOptions& opt, const std::vector<DecreaseMode>& modes,
                                         const Poly& barrier, const std::string& label,
                                         std::vector<ProgramDiagnostic>& diagnostics) {
  ProgramSpec spec;
  spec.name = "compose_" + label;
  spec.modes = modes;
  spec.fixed_certificate = barrier;
  auto parts = split_components(build_program(pomdp, lambda, t_star, d, with_jobs(opt.program, opt.jobs), spec));
  auto solved = solve_all(std::move(parts), opt);
  CompositionRecord rec{spec, {}};
  bool ok = true;
  for (auto& s : solved) {
    diagnostics.push_back(s.diag);
    if (!s.ok()) {
      ok = false;
      continue;
    }
    rec.parts.push_back(std::move(*s.record));
  }
  if (!ok) return std::nullopt;
  return rec;
}

void finish(Verdict& v, const LearningPomdp& pomdp, const VerifyOptions& opt) {
  if (v.certificate) {
    audit_certificate(*v.certificate, pomdp, opt.audit_trajectories, opt.seed);
    v.outcome = Outcome::Verified;
  }
}

Certificate base_certificate(CertificateKind kind, const Rational& lambda, unsigned t_star, unsigned d,
                             const VerifyOptions& opt) {
  Certificate c;
  c.kind = kind;
  c.lambda = lambda;
  c.t_star = t_star;
  c.degree = d;
  c.options = opt.program;
  return c;
}

// One coupled program; its certificate is valid for every mode by construction.
Verdict verify_single(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star, unsigned d,
                      const VerifyOptions& opt, const ProgramSpec& spec, CertificateKind kind,
                      const PartitionPolicy* policy) {
  const auto start = Clock::now();
  Verdict v;
  v.degree = d;
  Solved s = solve_spec(pomdp, lambda, t_star, d, opt, spec);
  v.diagnostics.push_back(s.diag);
  if (s.ok()) {
    Certificate c = base_certificate(kind, lambda, t_star, d, opt);
    c.labels.push_back(spec.name);
    c.barriers.push_back(extract_barrier(*s.record));
    c.programs.push_back(std::move(*s.record));
    if (policy) c.policy = *policy;
    v.certificate = std::move(c);
  } else {
    v.note = "program " + spec.name + " is " + s.diag.status;
  }
  finish(v, pomdp, opt);
  v.seconds = seconds_since(start);
  return v;
}

// Local programs, then a cross-check of each local certificate against every
// mode, then (optionally) one coupled program.
Verdict verify_decomposed(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star, unsigned d,
                          const VerifyOptions& opt, const std::vector<ProgramSpec>& locals,
                          const std::vector<DecreaseMode>& all_modes, CertificateKind kind,
                          const PartitionPolicy* policy) {
  const auto start = Clock::now();
  Verdict v;
  v.degree = d;
  std::vector<Solved> solved(locals.size());
  detail::parallel_for(locals.size(), opt.jobs, [&](std::size_t i) {
    VerifyOptions inner = opt;
    inner.jobs = 1;
    solved[i] = solve_spec(pomdp, lambda, t_star, d, inner, locals[i]);
  });
  bool all_ok = true;
  for (const auto& s : solved) {
    v.diagnostics.push_back(s.diag);
    if (!s.ok() && all_ok) {
      v.note = "local program " + s.diag.program + " is " + s.diag.status;
      all_ok = false;
    }
  }
  if (!all_ok) {
    v.seconds = seconds_since(start);
    return v;
  }

  Certificate c = base_certificate(kind, lambda, t_star, d, opt);
  if (policy) c.policy = *policy;
  for (auto& s : solved) {
    c.labels.push_back(s.record->program.certificates.at(0).label);
    c.barriers.push_back(extract_barrier(*s.record));
    c.programs.push_back(std::move(*s.record));
  }
  for (std::size_t i = 0; i < c.barriers.size() && !c.composition; ++i) {
    if (auto rec = compose(pomdp, lambda, t_star, d, opt, all_modes, c.barriers[i], c.labels[i], v.diagnostics)) {
      c.composite = i;
      c.composition = std::move(rec);
    }
  }
  if (!c.composition) {
    if (!opt.joint_fallback) {
      v.note = "no local certificate is valid for every mode";
      v.seconds = seconds_since(start);
      return v;
    }
    ProgramSpec joint;
    joint.name = "joint";
    joint.modes = all_modes;
    Solved s = solve_spec(pomdp, lambda, t_star, d, opt, joint);
    v.diagnostics.push_back(s.diag);
    if (!s.ok()) {
      v.note = "local certificates do not compose and the coupled program is " + s.diag.status;
      v.seconds = seconds_since(start);
      return v;
    }
    v.note = "local certificates do not compose; coupled certificate used";
    c.labels.push_back(joint.name);
    c.barriers.push_back(extract_barrier(*s.record));
    c.programs.push_back(std::move(*s.record));
    c.composite = c.barriers.size() - 1;
  }
  v.certificate = std::move(c);
  finish(v, pomdp, opt);
  v.seconds = seconds_since(start);
  return v;
}

}  // namespace

Verdict verify_arbitrary(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star, unsigned d,
                         const VerifyOptions& options) {
  ProgramSpec spec;
  spec.name = "monolithic";
  spec.modes = arbitrary_modes(pomdp);
  return verify_single(pomdp, lambda, t_star, d, options, spec, CertificateKind::Monolithic, nullptr);
}

Verdict verify_per_example(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star, unsigned d,
                           const VerifyOptions& options) {
  const auto modes = arbitrary_modes(pomdp);
  std::vector<ProgramSpec> locals;
  for (const auto& mode : modes) {
    ProgramSpec spec;
    spec.name = "example_" + mode.label;
    spec.modes = {mode};
    locals.push_back(std::move(spec));
  }
  return verify_decomposed(pomdp, lambda, t_star, d, options, locals, modes, CertificateKind::PerExample, nullptr);
}

Verdict verify_policy(const LearningPomdp& pomdp, const PartitionPolicy& policy, const Rational& lambda,
                      unsigned t_star, unsigned d, const VerifyOptions& options) {
  const auto modes = policy_modes(policy);
  if (options.program.effective_coupling() == PolicyCoupling::Shared) {
    ProgramSpec spec;
    spec.name = "policy";
    spec.modes = modes;
    return verify_single(pomdp, lambda, t_star, d, options, spec, CertificateKind::PerPartition, &policy);
  }
  std::vector<ProgramSpec> locals;
  for (const auto& mode : modes) {
    ProgramSpec spec;
    spec.name = "region_" + mode.label;
    spec.modes = {mode};
    spec.failure_region = mode.region;
    spec.initial = std::all_of(mode.region.begin(), mode.region.end(),
                               [&](const Poly& g) { return g.eval(pomdp.p0()) <= 0; });
    locals.push_back(std::move(spec));
  }
  return verify_decomposed(pomdp, lambda, t_star, d, options, locals, modes, CertificateKind::PerPartition,
                           &policy);
}

Verdict verify(const LearningPomdp& pomdp, VerifyMode mode, const PartitionPolicy* policy, const Rational& lambda,
               unsigned t_star, unsigned d, const VerifyOptions& options) {
  if (mode == VerifyMode::Policy && policy == nullptr) throw InvariantViolation("policy mode needs a policy");
  const unsigned cap = options.escalate ? std::max(d, options.degree_cap) : d;
  Verdict last;
  std::vector<ProgramDiagnostic> history;
  double total = 0;
  for (unsigned deg = d; deg <= cap; deg += 2) {
    switch (mode) {
      case VerifyMode::Arbitrary: last = verify_arbitrary(pomdp, lambda, t_star, deg, options); break;
      case VerifyMode::PerExample: last = verify_per_example(pomdp, lambda, t_star, deg, options); break;
      case VerifyMode::Policy: last = verify_policy(pomdp, *policy, lambda, t_star, deg, options); break;
    }
    total += last.seconds;
    if (last.verified() || deg + 2 > cap) break;
    history.insert(history.end(), last.diagnostics.begin(), last.diagnostics.end());
  }
  history.insert(history.end(), last.diagnostics.begin(), last.diagnostics.end());
  last.diagnostics = std::move(history);
  last.seconds = total;
  return last;
}

MinTrialsResult min_trials(const LearningPomdp& pomdp, const Rational& lambda, unsigned d, unsigned t_max,
                           VerifyMode mode, const PartitionPolicy* policy, const VerifyOptions& options) {
  if (t_max < 1) throw InvariantViolation("t_max must be at least 1");
  MinTrialsResult out;
  for (unsigned t = t_max; t >= 1; --t) {
    Verdict v = verify(pomdp, mode, policy, lambda, t, d, options);
    const bool ok = v.verified();
    out.attempts.emplace_back(t, std::move(v));
    if (!ok) break;
    out.t_star = t;
  }
  return out;
}

namespace {

// Copy of rec.assignment with the certificate columns taken from `barrier`.
RationalVector overwrite_certificate(const ProgramRecord& rec, const Poly& barrier) {
  RationalVector x = rec.assignment;
  for (const auto& cert : rec.program.certificates)
    for (const auto& [m, coeff] : cert.poly.terms()) {
      if (coeff.terms().size() != 1 || coeff.constant() != 0)
        throw InvariantViolation("certificate coefficient is not a single variable");
      const auto [var, scale] = *coeff.terms().begin();
      x.at(static_cast<std::size_t>(var)) = barrier.coefficient(m) / scale;
    }
  return x;
}

}  // namespace

CertificateAudit try_audit_certificate(const Certificate& cert, const LearningPomdp& pomdp,
                                       std::size_t trajectories, std::uint64_t seed) {
  CertificateAudit out;
  auto& failures = out.failures;
  if (cert.barriers.size() != cert.labels.size() || cert.composite >= cert.barriers.size()) {
    failures.push_back("certificate: malformed barrier list");
    return out;
  }
  const Poly& B = cert.barrier();

  // Programs, with certificate columns re-derived from the reported barriers.
  for (const auto& rec : cert.programs) {
    const Poly* barrier = nullptr;
    for (const auto& tmpl : rec.program.certificates)
      for (std::size_t i = 0; i < cert.labels.size(); ++i)
        if (cert.labels[i] == tmpl.label) barrier = &cert.barriers[i];
    if (!rec.program.certificates.empty() && barrier == nullptr) {
      failures.push_back(rec.program.name + ": no reported barrier for its certificate");
      continue;
    }
    check_program(rec.program, barrier ? overwrite_certificate(rec, *barrier) : rec.assignment, failures);
  }

  // Composition rebuilt from the composite barrier itself.
  if (cert.composition) {
    ProgramSpec spec = cert.composition->spec;
    spec.fixed_certificate = B;
    const auto parts = split_components(build_program(pomdp, cert.lambda, cert.t_star, cert.degree, cert.options, spec));
    if (parts.size() != cert.composition->parts.size()) {
      failures.push_back(spec.name + ": component count changed on rebuild");
    } else {
      for (std::size_t i = 0; i < parts.size(); ++i) check_program(parts[i], cert.composition->parts[i].assignment, failures);
    }
  } else if (cert.kind != CertificateKind::Monolithic && cert.programs.size() > 1 &&
             cert.labels[cert.composite] != "joint") {
    failures.push_back("certificate: composite barrier was never checked against every mode");
  }

  if (!(barrier_value(B, 0, pomdp.p0()) < 0)) failures.push_back("initial: B(0, p0) is not negative");

  // Non-increase along sampled positive-probability trajectories.
  std::mt19937_64 rng(seed);
  const std::size_t nz = pomdp.num_examples();
  const std::size_t ny = pomdp.num_observations();
  for (std::size_t r = 0; r < trajectories && failures.empty(); ++r) {
    Belief b = Belief::exact(pomdp.p0());
    Rational prev = barrier_value(B, 0, b.exact_weights());
    for (unsigned t = 1; t <= cert.t_star; ++t) {
      std::size_t z = 0;
      if (cert.policy) {
        z = cert.policy->example_at(b);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, nz - 1);
        z = pick(rng);
      }
      std::vector<RationalUpdate> forms;
      std::vector<double> probs;
      for (std::size_t y = 0; y < ny; ++y) {
        forms.push_back(linear_forms(pomdp, z, y));
        probs.push_back(to_double(observation_probability(b.exact_weights(), forms.back())));
      }
      std::discrete_distribution<std::size_t> draw(probs.begin(), probs.end());
      std::size_t y = draw(rng);
      if (observation_probability(b.exact_weights(), forms[y]) == 0) {
        // Rounding picked an impossible observation; take the first possible one.
        y = 0;
        while (observation_probability(b.exact_weights(), forms[y]) == 0) ++y;
      }
      b = update(b, forms[y]);
      const Rational now = barrier_value(B, t, b.exact_weights());
      if (now > prev) {
        failures.push_back("trajectory " + std::to_string(r) + ": B increases at t = " + std::to_string(t));
        break;
      }
      prev = now;
    }
    if (failures.empty() && b.exact_weights().at(pomdp.target()) < cert.lambda)
      failures.push_back("trajectory " + std::to_string(r) + ": target belief below lambda at t*");
    ++out.trajectories;
  }
  out.passed = failures.empty();
  return out;
}

CertificateAudit audit_certificate(const Certificate& cert, const LearningPomdp& pomdp, std::size_t trajectories,
                                   std::uint64_t seed) {
  CertificateAudit out = try_audit_certificate(cert, pomdp, trajectories, seed);
  if (!out.passed) throw AuditFailed("certificate audit failed: " + out.failures.front());
  return out;
}

}  // namespace teachcert
