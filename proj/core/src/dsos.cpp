#include "teachcert/dsos.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "parallel.hpp"
#include "teachcert/errors.hpp"

namespace teachcert {

namespace {

std::string lp_safe(std::string name) {
  for (char& c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' || c == ']'))
      c = '_';
  return name;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Gram products grouped by the monomial they produce.
std::map<Monomial, std::vector<std::pair<VarId, Rational>>> gram_terms(const DsosConstraint& c) {
  std::map<Monomial, std::vector<std::pair<VarId, Rational>>> out;
  const auto& m = c.basis.monomials;
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[m[i] * m[i]].emplace_back(c.diagonal[i], Rational(1));
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const auto [plus, minus] = c.off_diagonal[c.off_index(i, j)];
      auto& slot = out[m[i] * m[j]];
      slot.emplace_back(plus, Rational(2));
      slot.emplace_back(minus, Rational(-2));
    }
  }
  for (const auto& [mono, v] : c.orthant_terms) out[mono].emplace_back(v, Rational(1));
  return out;
}

AffineExpr remap(const AffineExpr& e, const std::vector<VarId>& map) {
  AffineExpr out(e.constant());
  for (const auto& [v, c] : e.terms()) out.add_var(map[static_cast<std::size_t>(v)], c);
  return out;
}

PolyTemplate remap(const PolyTemplate& p, const std::vector<VarId>& map) {
  PolyTemplate out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, remap(c, map));
  return out;
}

/// Value of a template at a concrete point, as an affine expression.
AffineExpr evaluate_at(const PolyTemplate& p, const RationalVector& point) {
  AffineExpr out;
  for (const auto& [m, c] : p.terms()) {
    Rational v = 1;
    for (std::size_t i = 0; i < m.nvars(); ++i)
      for (unsigned k = 0; k < m[i]; ++k) v *= point[i];
    if (v != 0) out += c * v;
  }
  return out;
}

PolyTemplate template_from(const std::vector<Monomial>& monomials, VarRegistry& vars,
                           const std::string& prefix, VarKind kind, bool nonneg, std::size_t nvars) {
  PolyTemplate out(nvars);
  for (std::size_t k = 0; k < monomials.size(); ++k)
    out.add_term(monomials[k], AffineExpr::var(vars.add(prefix + std::to_string(k), kind, nonneg)));
  return out;
}

}  // namespace

VarId VarRegistry::add(std::string name, VarKind kind, bool nonneg) {
  vars_.push_back({std::move(name), kind, nonneg});
  return static_cast<VarId>(vars_.size() - 1);
}

std::size_t DsosConstraint::off_index(std::size_t i, std::size_t j) const {
  const std::size_t k = basis.monomials.size();
  // row-major upper triangle without the diagonal
  return i * k - i * (i + 1) / 2 + (j - i - 1);
}

DsosConstraint dsos_encode(const PolyTemplate& target, VarRegistry& vars, const std::string& name,
                           std::optional<unsigned> degree, bool homogeneous) {
  const int own = target.degree();
  unsigned D = degree.value_or(static_cast<unsigned>(std::max(own, 0)));
  if (D % 2 != 0) throw OddDegree("constraint '" + name + "' has odd degree " + std::to_string(D));
  if (own > static_cast<int>(D))
    throw InvariantViolation("constraint '" + name + "' exceeds its degree bound");
  const std::size_t n = target.nvars();

  DsosConstraint c;
  c.name = name;
  c.target = target;
  c.degree = D;
  c.homogeneous = homogeneous;
  c.basis.monomials = homogeneous ? monomials_of_degree(n, n, D / 2) : monomials_up_to(n, n, D / 2);
  const std::size_t k = c.basis.monomials.size();
  c.diagonal.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    c.diagonal.push_back(vars.add(name + "_q" + std::to_string(i), VarKind::Gram, true));
  c.off_diagonal.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::string ij = std::to_string(i) + "_" + std::to_string(j);
      const VarId plus = vars.add(name + "_p" + ij, VarKind::Gram, true);
      const VarId minus = vars.add(name + "_n" + ij, VarKind::Gram, true);
      c.off_diagonal.emplace_back(plus, minus);
    }
  if (homogeneous) {
    const auto top = monomials_of_degree(n, n, D);
    c.orthant_terms.reserve(top.size());
    for (std::size_t a = 0; a < top.size(); ++a)
      c.orthant_terms.emplace_back(top[a], vars.add(name + "_u" + std::to_string(a), VarKind::Gram, true));
  }
  return c;
}

GramValues recover_gram(const DsosConstraint& c, const RationalVector& assignment) {
  const std::size_t k = c.basis.monomials.size();
  GramValues g;
  g.Q.assign(k, RationalVector(k, Rational(0)));
  for (std::size_t i = 0; i < k; ++i) {
    g.Q[i][i] = assignment.at(static_cast<std::size_t>(c.diagonal[i]));
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto [plus, minus] = c.off_diagonal[c.off_index(i, j)];
      g.Q[i][j] = assignment.at(static_cast<std::size_t>(plus)) - assignment.at(static_cast<std::size_t>(minus));
      g.Q[j][i] = g.Q[i][j];
    }
  }
  for (const auto& [m, v] : c.orthant_terms) g.orthant.push_back(assignment.at(static_cast<std::size_t>(v)));
  return g;
}

Poly gram_polynomial(const DsosConstraint& c, const GramValues& g) {
  Poly out(c.target.nvars());
  const auto& m = c.basis.monomials;
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.add_term(m[i] * m[i], g.Q[i][i]);
    for (std::size_t j = i + 1; j < m.size(); ++j) out.add_term(m[i] * m[j], 2 * g.Q[i][j]);
  }
  for (std::size_t a = 0; a < c.orthant_terms.size(); ++a) out.add_term(c.orthant_terms[a].first, g.orthant[a]);
  return out;
}

bool diagonally_dominant(const GramValues& g) {
  for (std::size_t i = 0; i < g.Q.size(); ++i) {
    Rational off = 0;
    for (std::size_t j = 0; j < g.Q.size(); ++j)
      if (j != i) off += abs(g.Q[i][j]);
    if (g.Q[i][i] < off) return false;
  }
  return std::all_of(g.orthant.begin(), g.orthant.end(), [](const Rational& v) { return v >= 0; });
}

lp::Problem DsosProgram::to_lp() const {
  lp::Problem p;
  for (const auto& v : vars.all()) p.add_column(lp_safe(v.name), v.nonneg);
  for (const auto& c : constraints) {
    auto gram = gram_terms(c);
    for (const auto& [m, coeff] : c.target.terms()) gram.try_emplace(m);
    for (const auto& [m, parts] : gram) {
      const AffineExpr lhs = c.target.coefficient(m);
      std::vector<std::pair<int, Rational>> row;
      for (const auto& [v, a] : lhs.terms()) row.emplace_back(v, a);
      for (const auto& [v, a] : parts) row.emplace_back(v, -a);
      std::string label;
      for (std::size_t i = 0; i < m.nvars(); ++i) label += (i ? "_" : "") + std::to_string(m[i]);
      p.add_row(lp_safe(c.name + "_m[" + label + "]"), std::move(row), lp::RowSense::Eq, -lhs.constant());
    }
    const std::size_t k = c.basis.monomials.size();
    if (k < 2) continue;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::pair<int, Rational>> row{{c.diagonal[i], Rational(1)}};
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i) continue;
        const auto [plus, minus] = c.off_diagonal[c.off_index(std::min(i, j), std::max(i, j))];
        row.emplace_back(plus, Rational(-1));
        row.emplace_back(minus, Rational(-1));
      }
      p.add_row(lp_safe(c.name + "_dd" + std::to_string(i)), std::move(row), lp::RowSense::Ge, 0);
    }
  }
  for (const auto& l : linear) {
    std::vector<std::pair<int, Rational>> row;
    for (const auto& [v, a] : l.expr.terms()) row.emplace_back(v, a);
    p.add_row(lp_safe(l.name), std::move(row), l.sense, -l.expr.constant());
  }
  return p;
}

std::size_t DsosProgram::estimated_rows() const {
  std::size_t rows = linear.size();
  for (const auto& c : constraints) {
    const std::size_t n = c.target.nvars();
    const std::size_t k = c.basis.monomials.size();
    const std::size_t monos = c.homogeneous ? binomial(n + c.degree - 1, c.degree) : binomial(n + c.degree, c.degree);
    rows += monos + (k > 1 ? k : 0);
  }
  return rows;
}

std::vector<DsosProgram> split_components(const DsosProgram& program) {
  const std::size_t nv = program.vars.size();
  std::vector<std::size_t> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  auto unite = [&](const std::vector<VarId>& vs) {
    for (std::size_t i = 1; i < vs.size(); ++i) parent[find(static_cast<std::size_t>(vs[i]))] = find(static_cast<std::size_t>(vs[0]));
  };
  auto constraint_vars = [](const DsosConstraint& c) {
    std::vector<VarId> vs = c.target.variables();
    vs.insert(vs.end(), c.diagonal.begin(), c.diagonal.end());
    for (const auto& [p, m] : c.off_diagonal) {
      vs.push_back(p);
      vs.push_back(m);
    }
    for (const auto& [mono, v] : c.orthant_terms) vs.push_back(v);
    return vs;
  };
  auto linear_vars = [](const LinearConstraint& l) {
    std::vector<VarId> vs;
    for (const auto& [v, a] : l.expr.terms()) vs.push_back(v);
    return vs;
  };
  for (const auto& c : program.constraints) unite(constraint_vars(c));
  for (const auto& l : program.linear) unite(linear_vars(l));
  for (const auto& cert : program.certificates) unite(cert.poly.variables());

  // Component key: root of the first variable, or a fresh key for variable-free items.
  std::map<std::size_t, std::size_t> component_of_root;
  std::vector<DsosProgram> out;
  std::vector<std::vector<VarId>> maps;
  auto component = [&](const std::vector<VarId>& vs) -> std::size_t {
    if (!vs.empty()) {
      const std::size_t root = find(static_cast<std::size_t>(vs[0]));
      auto it = component_of_root.find(root);
      if (it != component_of_root.end()) return it->second;
      component_of_root[root] = out.size();
    }
    DsosProgram part;
    part.name = program.name + "_part" + std::to_string(out.size());
    part.failure_set_empty = program.failure_set_empty;
    out.push_back(std::move(part));
    maps.emplace_back(nv, -1);
    return out.size() - 1;
  };
  auto local = [&](std::size_t comp, const std::vector<VarId>& vs) {
    for (VarId v : vs) {
      auto& slot = maps[comp][static_cast<std::size_t>(v)];
      if (slot < 0) {
        const auto& info = program.vars.info(v);
        slot = out[comp].vars.add(info.name, info.kind, info.nonneg);
      }
    }
    return maps[comp];
  };
  for (const auto& c : program.constraints) {
    auto vs = constraint_vars(c);
    // Certificate and multiplier variables first so column order is stable.
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    const std::size_t comp = component(vs);
    const auto& map = local(comp, vs);
    DsosConstraint copy = c;
    copy.target = remap(c.target, map);
    for (auto& v : copy.diagonal) v = map[static_cast<std::size_t>(v)];
    for (auto& [p, m] : copy.off_diagonal) {
      p = map[static_cast<std::size_t>(p)];
      m = map[static_cast<std::size_t>(m)];
    }
    for (auto& [mono, v] : copy.orthant_terms) v = map[static_cast<std::size_t>(v)];
    out[comp].constraints.push_back(std::move(copy));
    if (c.role == "decrease") ++out[comp].decrease_constraints;
  }
  for (const auto& l : program.linear) {
    auto vs = linear_vars(l);
    const std::size_t comp = component(vs);
    const auto& map = local(comp, vs);
    out[comp].linear.push_back({l.name, remap(l.expr, map), l.sense});
  }
  for (const auto& cert : program.certificates) {
    auto vs = cert.poly.variables();
    if (vs.empty()) continue;
    const std::size_t comp = component(vs);
    const auto& map = local(comp, vs);
    out[comp].certificates.push_back({cert.label, remap(cert.poly, map)});
  }
  return out;
}

std::vector<DecreaseMode> arbitrary_modes(const LearningPomdp& pomdp) {
  std::vector<DecreaseMode> modes;
  for (std::size_t z = 0; z < pomdp.num_examples(); ++z) modes.push_back({z, {}, "z" + std::to_string(z)});
  return modes;
}

std::vector<DecreaseMode> policy_modes(const PartitionPolicy& policy) {
  // Regions teaching the same example share one mode localized to the
  // inequalities common to all of them (a superset of each region).
  std::vector<DecreaseMode> modes;
  for (const auto& region : policy.regions) {
    auto it = std::find_if(modes.begin(), modes.end(), [&](const DecreaseMode& m) { return m.example == region.example; });
    if (it == modes.end()) {
      modes.push_back({region.example, region.inequalities, "z" + std::to_string(region.example)});
      continue;
    }
    std::erase_if(it->region, [&](const Poly& g) {
      return std::find(region.inequalities.begin(), region.inequalities.end(), g) == region.inequalities.end();
    });
  }
  return modes;
}

DsosProgram build_program(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star,
                          unsigned d, const ProgramOptions& options, const ProgramSpec& spec) {
  if (lambda < 0 || lambda > 1) throw InvalidPerformance("teaching performance must lie in [0, 1]");
  if (d % 2 != 0) throw OddDegree("certificate degree must be even, got " + std::to_string(d));
  if (t_star < 1) throw InvariantViolation("the number of trials must be at least 1");

  const std::size_t n = pomdp.num_hypotheses();
  const std::size_t ring = n + 1;
  const bool localized = options.localized();
  const unsigned mult_cap = options.multiplier_degree.value_or(d);
  const Poly unit = Poly::linear(n, LinearForm(n, Rational(1)));

  DsosProgram prog;
  prog.name = spec.name;
  // Failure set {b in simplex : b(h*) < lambda} is empty when lambda <= min b(h*).
  const Rational min_target_mass = n == 1 ? Rational(1) : Rational(0);
  prog.failure_set_empty = lambda <= min_target_mass;

  PolyTemplate barrier(ring);
  if (spec.fixed_certificate) {
    if (spec.fixed_certificate->nvars() != ring) throw RingMismatch("certificate ring must be |H| + 1");
    if (spec.fixed_certificate->degree() > static_cast<int>(d))
      throw InvariantViolation("certificate degree exceeds the program degree");
    barrier = PolyTemplate(*spec.fixed_certificate);
  } else {
    // Without a failure condition a negative constant always works.
    const unsigned degree = prog.failure_set_empty ? 0 : d;
    barrier = template_from(monomials_up_to(ring, ring, degree), prog.vars, "B_", VarKind::Certificate, false, ring);
    prog.certificates.push_back({spec.name, barrier});
  }
  auto at = [&](unsigned t) {
    return barrier.substitute_var(n, Poly::constant(ring, Rational(t))).restrict_ring(n);
  };

  // Multiplier usable in a target of degree `budget`; `nullopt` when none fits.
  auto multiplier = [&](int budget, const std::string& name) -> std::optional<PolyTemplate> {
    if (budget < 0) return std::nullopt;
    unsigned k = std::min<unsigned>(mult_cap, static_cast<unsigned>(budget));
    if (localized) {
      return template_from(monomials_of_degree(n, n, k), prog.vars, name + "_", VarKind::Multiplier, true, n);
    }
    k -= k % 2;
    auto p = template_from(monomials_up_to(n, n, k), prog.vars, name + "_", VarKind::Multiplier, false, n);
    prog.constraints.push_back(dsos_encode(p, prog.vars, name + "_sos", k, false));
    prog.constraints.back().role = "multiplier";
    return p;
  };
  auto localize = [&](PolyTemplate& target, const std::vector<Poly>& region, unsigned D, const std::string& name) {
    for (std::size_t k = 0; k < region.size(); ++k) {
      const Poly& g = region[k];
      if (g.nvars() != n) throw RingMismatch("region inequality must live in the belief ring");
      if (auto p = multiplier(static_cast<int>(D) - g.degree(), name + "_l" + std::to_string(k))) target += *p * g;
    }
  };

  if (!prog.failure_set_empty) {
    PolyTemplate target = at(t_star);
    Poly gap = Poly::variable(n, pomdp.target()) - Poly::constant(n, lambda);
    if (auto pf = multiplier(static_cast<int>(d) - 1, "pf")) target += *pf * gap;
    localize(target, spec.failure_region, d, "fail");
    target -= PolyTemplate(Poly::constant(n, options.margin));
    if (localized) target = homogenize(target, d, unit);
    prog.constraints.push_back(dsos_encode(target, prog.vars, "fail", d, localized));
    prog.constraints.back().role = "failure";
  }

  if (spec.initial) {
    AffineExpr e = evaluate_at(at(0), pomdp.p0()) * Rational(-1) - options.margin;
    prog.linear.push_back({"init", e, lp::RowSense::Ge});
  }

  struct Item {
    const DecreaseMode* mode;
    unsigned t;
    std::size_t y;
    RationalUpdate forms;
    PolyTemplate target;
    unsigned degree = 0;
  };
  std::vector<Item> items;
  for (const auto& mode : spec.modes) {
    if (mode.example >= pomdp.num_examples()) throw OutOfBounds("mode example index out of range");
    for (unsigned t = 1; t <= t_star; ++t)
      for (std::size_t y = 0; y < pomdp.num_observations(); ++y) {
        ++prog.decrease_constraints;
        auto forms = linear_forms(pomdp, mode.example, y);
        if (forms.vacuous()) {
          ++prog.vacuous_constraints;
          continue;
        }
        items.push_back({&mode, t, y, std::move(forms), PolyTemplate(n), 0});
      }
  }

  detail::parallel_for(items.size(), options.jobs, [&](std::size_t i) {
    Item& it = items[i];
    const PolyTemplate now = at(it.t);
    const PolyTemplate before = at(it.t - 1);
    const PolyTemplate cleared = compose_cleared(now, it.forms, d);
    const Poly R = Poly::linear(n, it.forms.R);
    if (localized) {
      const bool uniform = std::all_of(it.forms.R.begin(), it.forms.R.end(),
                                       [&](const Rational& r) { return r == it.forms.R[0]; });
      if (uniform) {
        Rational scale = 1;
        for (unsigned k = 0; k < d; ++k) scale *= it.forms.R[0];
        PolyTemplate hb = homogenize(before, d, unit);
        hb *= scale;
        it.target = hb - cleared;
        it.degree = d;
      } else {
        it.target = homogenize(before, d, unit) * R.pow(d) - homogenize(cleared, 2 * d, unit);
        it.degree = 2 * d;
      }
    } else {
      it.target = before * R.pow(d) - cleared;
      it.degree = 2 * d;
    }
  });

  for (auto& it : items) {
    const std::string name =
        "dec_" + it.mode->label + "_t" + std::to_string(it.t) + "_y" + std::to_string(it.y);
    localize(it.target, it.mode->region, it.degree, name);
    if (localized) it.target = homogenize(it.target, it.degree, unit);
    prog.constraints.push_back(dsos_encode(it.target, prog.vars, name, it.degree, localized));
    prog.constraints.back().role = "decrease";
  }
  return prog;
}

DsosProgram assemble_monolithic(const LearningPomdp& pomdp, const Rational& lambda, unsigned t_star,
                                unsigned d, const ProgramOptions& options) {
  ProgramSpec spec;
  spec.name = "monolithic";
  spec.modes = arbitrary_modes(pomdp);
  return build_program(pomdp, lambda, t_star, d, options, spec);
}

std::vector<DsosProgram> assemble_per_example(const LearningPomdp& pomdp, const Rational& lambda,
                                              unsigned t_star, unsigned d, const ProgramOptions& options) {
  std::vector<DsosProgram> out;
  const auto modes = arbitrary_modes(pomdp);
  for (const auto& mode : modes) {
    ProgramSpec spec;
    spec.name = "example_" + mode.label;
    spec.modes = {mode};
    out.push_back(build_program(pomdp, lambda, t_star, d, options, spec));
  }
  return out;
}

std::vector<DsosProgram> assemble_policy(const LearningPomdp& pomdp, const PartitionPolicy& policy,
                                         const Rational& lambda, unsigned t_star, unsigned d,
                                         const ProgramOptions& options) {
  const auto modes = policy_modes(policy);
  if (options.effective_coupling() == PolicyCoupling::Shared) {
    ProgramSpec spec;
    spec.name = "policy";
    spec.modes = modes;
    return {build_program(pomdp, lambda, t_star, d, options, spec)};
  }
  std::vector<DsosProgram> out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    ProgramSpec spec;
    spec.name = "region_" + modes[i].label;
    spec.modes = {modes[i]};
    spec.failure_region = modes[i].region;
    // The initial condition binds only when p0 lies in the region.
    spec.initial = std::all_of(modes[i].region.begin(), modes[i].region.end(),
                               [&](const Poly& g) { return g.eval(pomdp.p0()) <= 0; });
    out.push_back(build_program(pomdp, lambda, t_star, d, options, spec));
  }
  return out;
}

}  // namespace teachcert
