#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "teachcert/errors.hpp"
#include "teachcert/lp.hpp"
#include "teachcert/model.hpp"
#include "teachcert/oracle.hpp"
#include "teachcert/policies.hpp"
#include "teachcert/report.hpp"
#include "teachcert/verify.hpp"

namespace teachcert::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ConfigError : public Error {
  using Error::Error;
};

struct Config {
  std::string scenario;
  std::string out_dir = "reports";
  std::string lambda = "0.8";
  std::string mode = "arbitrary";
  std::string policy;
  std::string coupling = "shared";
  unsigned t = 1;
  unsigned t_max = 16;
  unsigned degree = 2;
  unsigned degree_cap = 4;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  bool no_simplex = false;
  bool paper_faithful = false;
  bool exact_lp = false;
  bool version_space = false;
  bool escalate = false;
  bool csv = false;
  bool fresh = false;
  std::size_t row_budget = 12000;
  std::size_t runs = 10000;
  std::size_t horizon = 16;
  std::size_t trajectories = 100;
  std::size_t node_budget = 1'000'000;
  bool merge = false;
  int rows = 4;
  int cols = 4;
  std::string h0 = "1,1";
  std::string target = "3,4";
  std::string variant = "label";
  std::string output;
  std::string program = "monolithic";
  std::string lp_file;
};

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

// Reports are never overwritten; an identical configuration maps to the same file.
bool write_once(const fs::path& path, const std::string& text, std::ostream& out) {
  if (fs::exists(path)) {
    out << "report exists: " << path.string() << '\n';
    return false;
  }
  write_file(path, text);
  out << "wrote " << path.string() << '\n';
  return true;
}

std::pair<int, int> parse_cell(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("expected row,col but got '" + s + "'");
  try {
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("expected row,col but got '" + s + "'");
  }
}

Rational parse_lambda(const std::string& s) {
  Rational q;
  try {
    q = parse_rational(s);
  } catch (const Error&) {
    throw ConfigError("lambda must be a rational number, got '" + s + "'");
  }
  if (q < 0 || q > 1) throw InvalidPerformance("lambda must lie in [0, 1]");
  return q;
}

struct ResolvedPolicy {
  PartitionPolicy partition;
  std::optional<AdaptivePolicy> adaptive;
};

ResolvedPolicy resolve_policy(const LearningPomdp& pomdp, const std::string& spec) {
  if (spec.empty()) throw ConfigError("--policy is required here");
  ResolvedPolicy r;
  if (spec == "myopic" || spec == "ada-l") {
    r.adaptive = spec == "myopic" ? AdaptivePolicy::myopic() : AdaptivePolicy::ada_l();
    r.partition = policy_to_partition(pomdp, *r.adaptive);
  } else if (spec.rfind("always:", 0) == 0) {
    std::size_t z = 0;
    try {
      z = std::stoul(spec.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("always:<example index> expected, got '" + spec + "'");
    }
    if (z >= pomdp.num_examples()) throw ConfigError("example index out of range in " + spec);
    r.partition = PartitionPolicy::constant(pomdp.num_hypotheses(), z);
  } else {
    PolicyFile file = load_policy(read_file(spec), pomdp.num_hypotheses());
    if (file.adaptive) {
      r.adaptive = file.adaptive;
      r.partition = policy_to_partition(pomdp, *file.adaptive);
    } else if (file.partition) {
      r.partition = *file.partition;
    } else {
      throw ConfigError("policy file describes no policy: " + spec);
    }
  }
  validate_partition(pomdp, r.partition);
  return r;
}

VerifyMode parse_mode(const std::string& m) {
  if (m == "arbitrary") return VerifyMode::Arbitrary;
  if (m == "per-example") return VerifyMode::PerExample;
  if (m == "policy") return VerifyMode::Policy;
  throw ConfigError("unknown mode '" + m + "'");
}

VerifyOptions verify_options(const Config& c) {
  VerifyOptions o;
  o.program.simplex_multipliers = !c.no_simplex;
  o.program.paper_faithful = c.paper_faithful;
  o.program.coupling = c.coupling == "independent" ? PolicyCoupling::Independent : PolicyCoupling::Shared;
  o.program.jobs = c.jobs;
  o.exact_lp = c.exact_lp;
  o.escalate = c.escalate;
  o.degree_cap = c.degree_cap;
  o.row_budget = c.row_budget;
  o.audit_trajectories = c.trajectories;
  o.seed = c.seed;
  o.jobs = c.jobs;
  return o;
}

std::map<std::string, std::string> flag_set(const Config& c) {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {{"scenario", c.scenario},
          {"lambda", c.lambda},
          {"mode", c.mode},
          {"policy", c.policy},
          {"coupling", c.coupling},
          {"t", std::to_string(c.t)},
          {"t_max", std::to_string(c.t_max)},
          {"degree", std::to_string(c.degree)},
          {"degree_cap", std::to_string(c.degree_cap)},
          {"simplex_multipliers", b(!c.no_simplex)},
          {"paper_faithful", b(c.paper_faithful)},
          {"exact_lp", b(c.exact_lp)},
          {"version_space", b(c.version_space)},
          {"escalate", b(c.escalate)},
          {"row_budget", std::to_string(c.row_budget)},
          {"runs", std::to_string(c.runs)},
          {"horizon", std::to_string(c.horizon)},
          {"trajectories", std::to_string(c.trajectories)},
          {"node_budget", std::to_string(c.node_budget)},
          {"merge", b(c.merge)}};
}

ReportContext context(const Config& c, const std::string& command, const Rational& lambda, unsigned t) {
  ReportContext ctx;
  ctx.command = command;
  ctx.mode = c.mode;
  ctx.lambda = lambda;
  ctx.t_star = t;
  ctx.degree = c.degree;
  ctx.seed = c.seed;
  ctx.flags = flag_set(c);
  return ctx;
}

// File stem unique to (command, scenario, flags); --jobs does not change results.
std::string report_stem(const LearningPomdp& pomdp, const ReportContext& ctx) {
  std::string key = ctx.command + "|" + pomdp_digest(pomdp) + "|" + to_string(ctx.lambda) + "|" +
                    std::to_string(ctx.t_star) + "|" + std::to_string(ctx.seed);
  for (const auto& [k, v] : ctx.flags) key += "|" + k + "=" + v;
  return ctx.command + "-" + pomdp_digest(pomdp).substr(0, 8) + "-" + fnv_hex(key);
}

// B(t, b_t) along sampled runs, composite barrier and pointwise minimum of all barriers.
std::string barrier_csv(const LearningPomdp& pomdp, const Certificate& cert, std::size_t runs, std::uint64_t seed) {
  std::ostringstream os;
  os << "run,t,target_belief,barrier,pointwise_min\n";
  std::mt19937_64 rng(seed);
  for (std::size_t r = 0; r < runs; ++r) {
    Belief b = Belief::exact(pomdp.p0());
    for (unsigned t = 0;; ++t) {
      Rational lowest = barrier_value(cert.barriers[0], t, b.exact_weights());
      for (const auto& B : cert.barriers) lowest = std::min(lowest, barrier_value(B, t, b.exact_weights()));
      os << r << ',' << t << ',' << to_double(b.exact_weights()[pomdp.target()]) << ','
         << to_double(barrier_value(cert.barrier(), t, b.exact_weights())) << ',' << to_double(lowest) << '\n';
      if (t == cert.t_star) break;
      std::size_t z = 0;
      if (cert.policy) {
        z = cert.policy->example_at(b);
      } else {
        z = std::uniform_int_distribution<std::size_t>(0, pomdp.num_examples() - 1)(rng);
      }
      std::vector<RationalUpdate> forms;
      std::vector<double> probs;
      for (std::size_t y = 0; y < pomdp.num_observations(); ++y) {
        forms.push_back(linear_forms(pomdp, z, y));
        probs.push_back(to_double(observation_probability(b.exact_weights(), forms.back())));
      }
      std::size_t y = std::discrete_distribution<std::size_t>(probs.begin(), probs.end())(rng);
      while (observation_probability(b.exact_weights(), forms[y]) == 0) y = (y + 1) % forms.size();
      b = update(b, forms[y]);
    }
  }
  return os.str();
}

Verdict run_verify(const Config& c, const LearningPomdp& pomdp, const Rational& lambda, unsigned t,
                   const std::optional<ResolvedPolicy>& policy, std::ostream& out, bool reuse) {
  ReportContext ctx = context(c, "verify", lambda, t);
  ctx.flags["t"] = std::to_string(t);
  const std::string stem = report_stem(pomdp, ctx);
  const fs::path report = fs::path(c.out_dir) / (stem + ".json");
  if (reuse && fs::exists(report)) {
    // Resume: the archived verdict was audited when it was written.
    const json doc = json::parse(read_file(report.string()));
    Verdict v;
    v.outcome = doc.at("verdict").at("outcome") == "verified" ? Outcome::Verified : Outcome::Unknown;
    v.degree = doc.at("verdict").at("degree").get<unsigned>();
    v.note = "resumed from " + report.string();
    out << "t*=" << t << ": " << to_string(v.outcome) << " (resumed)\n";
    return v;
  }
  const Verdict v = verify(pomdp, parse_mode(c.mode), policy ? &policy->partition : nullptr, lambda, t, c.degree,
                           verify_options(c));
  json doc = json::parse(verdict_report(pomdp, v, ctx));
  if (v.certificate) {
    const fs::path cert_path = fs::path(c.out_dir) / "certificates" / (stem + ".cert.json");
    if (!fs::exists(cert_path)) write_file(cert_path, certificate_json(*v.certificate));
    doc["certificate_file"] = cert_path.string();
    doc["verdict"].erase("certificate");
    if (c.csv) {
      const fs::path csv = fs::path(c.out_dir) / (stem + ".barrier.csv");
      if (!fs::exists(csv)) write_file(csv, barrier_csv(pomdp, *v.certificate, c.trajectories, c.seed));
      doc["plot_data"] = csv.string();
    }
  }
  out << "t*=" << t << ": " << to_string(v.outcome) << (v.note.empty() ? "" : " (" + v.note + ")") << '\n';
  write_once(report, doc.dump(2), out);
  return v;
}

int cmd_verify(const Config& c, std::ostream& out) {
  const auto pomdp = load_pomdp_file(c.scenario);
  const Rational lambda = parse_lambda(c.lambda);
  std::optional<ResolvedPolicy> policy;
  if (parse_mode(c.mode) == VerifyMode::Policy) policy = resolve_policy(pomdp, c.policy);
  run_verify(c, pomdp, lambda, c.t, policy, out, false);
  return 0;
}

int cmd_min_trials(const Config& c, std::ostream& out) {
  const auto pomdp = load_pomdp_file(c.scenario);
  const Rational lambda = parse_lambda(c.lambda);
  std::optional<ResolvedPolicy> policy;
  if (parse_mode(c.mode) == VerifyMode::Policy) policy = resolve_policy(pomdp, c.policy);
  MinTrialsResult result;
  for (unsigned t = c.t_max; t >= 1; --t) {
    Verdict v = run_verify(c, pomdp, lambda, t, policy, out, !c.fresh);
    const bool ok = v.verified();
    result.attempts.emplace_back(t, std::move(v));
    if (!ok) break;
    result.t_star = t;
  }
  out << "min t*: " << (result.t_star ? std::to_string(*result.t_star) : "none") << '\n';
  const ReportContext ctx = context(c, "min-trials", lambda, c.t_max);
  write_once(fs::path(c.out_dir) / (report_stem(pomdp, ctx) + ".json"), min_trials_report(pomdp, result, ctx), out);
  return 0;
}

int cmd_simulate(const Config& c, std::ostream& out) {
  const auto pomdp = load_pomdp_file(c.scenario);
  const auto policy = resolve_policy(pomdp, c.policy);
  if (c.version_space && !policy.adaptive) throw ConfigError("--version-space needs myopic, ada-l or a table policy");
  const auto result = simulate_teaching(pomdp, policy.partition, c.runs, c.horizon, c.seed, c.jobs);
  const ReportContext ctx = context(c, "simulate", 0, static_cast<unsigned>(c.horizon));
  json doc = json::parse(simulation_report(pomdp, result, ctx));
  if (c.version_space) {
    // Learner that keeps the version space of everything shown (hypothesis-aware teacher).
    std::vector<std::size_t> hits(c.horizon + 1, 0);
    for (std::size_t r = 0; r < c.runs; ++r) {
      const auto walk = learner_walk(pomdp, *policy.adaptive, c.horizon, c.seed + r, WalkVariant::Accumulated);
      for (std::size_t t = 0; t < walk.hypotheses.size(); ++t) hits[t] += walk.hypotheses[t] == pomdp.target();
    }
    json vs = json::array();
    for (std::size_t t = 0; t <= c.horizon; ++t)
      vs.push_back({{"t", t}, {"success_fraction", static_cast<double>(hits[t]) / static_cast<double>(c.runs)}});
    doc["version_space_learner"] = vs;
  }
  for (std::size_t t = 0; t <= c.horizon; t += std::max<std::size_t>(1, c.horizon / 8))
    out << "t=" << t << " success=" << result.success_fraction(t) << '\n';
  const std::string stem = report_stem(pomdp, ctx);
  if (c.csv) write_once(fs::path(c.out_dir) / (stem + ".csv"), simulation_csv(result), out);
  write_once(fs::path(c.out_dir) / (stem + ".json"), doc.dump(2), out);
  return 0;
}

int cmd_oracle(const Config& c, std::ostream& out) {
  const auto pomdp = load_pomdp_file(c.scenario);
  const Rational lambda = parse_lambda(c.lambda);
  std::optional<ResolvedPolicy> policy;
  OracleMode mode = OracleMode::Arbitrary;
  if (c.mode == "policy") {
    policy = resolve_policy(pomdp, c.policy);
    mode = OracleMode::FixedPolicy;
  } else if (c.mode != "arbitrary" && c.mode != "per-example") {
    throw ConfigError("unknown mode '" + c.mode + "'");
  }
  EnumerateOptions eo;
  eo.node_budget = c.node_budget;
  eo.merge_duplicates = c.merge;
  eo.jobs = c.jobs;
  const ReportContext ctx = context(c, "oracle", lambda, c.t);
  json doc = json::parse(verdict_report(pomdp, Verdict{}, ctx));
  doc.erase("verdict");
  try {
    const auto leaves = enumerate(pomdp, c.t, mode, policy ? &policy->partition : nullptr, eo);
    const auto check = check_performance(leaves, pomdp.target(), lambda);
    doc["holds"] = check.holds;
    doc["leaves"] = leaves.size();
    doc["worst"] = json::parse(witness_json(pomdp, check.worst));
    out << "holds = " << (check.holds ? "true" : "false") << " over " << leaves.size() << " leaves\n";
    if (!check.holds) out << witness_json(pomdp, check.worst) << '\n';
  } catch (const BudgetExceeded& e) {
    doc["holds"] = nullptr;
    doc["budget_exceeded"] = e.what();
    doc["attainable_depth"] = e.attainable_depth();
    out << e.what() << " (deepest complete level " << e.attainable_depth() << ")\n";
  }
  write_once(fs::path(c.out_dir) / (report_stem(pomdp, ctx) + ".json"), doc.dump(2), out);
  return 0;
}

int cmd_export_lp(const Config& c, std::ostream& out) {
  const auto pomdp = load_pomdp_file(c.scenario);
  const Rational lambda = parse_lambda(c.lambda);
  const ProgramOptions po = verify_options(c).program;
  std::vector<DsosProgram> programs;
  if (c.program == "monolithic") {
    programs.push_back(assemble_monolithic(pomdp, lambda, c.t, c.degree, po));
  } else if (c.program == "per-example") {
    programs = assemble_per_example(pomdp, lambda, c.t, c.degree, po);
  } else if (c.program == "policy") {
    programs = assemble_policy(pomdp, resolve_policy(pomdp, c.policy).partition, lambda, c.t, c.degree, po);
  } else {
    throw ConfigError("unknown program '" + c.program + "'");
  }
  for (const auto& p : programs) {
    const fs::path path = fs::path(c.out_dir) / (p.name + "-" + pomdp_digest(pomdp).substr(0, 8) + ".lp");
    const auto lp = p.to_lp();
    write_file(path, lp.to_text());
    out << "wrote " << path.string() << " (" << lp.num_rows() << " rows, " << lp.num_columns() << " columns)\n";
  }
  return 0;
}

int cmd_solve_lp(const Config& c, std::ostream& out) {
  const lp::Problem problem = lp::Problem::from_text(read_file(c.lp_file));
  lp::AuditedOptions ao;
  ao.exact = c.exact_lp;
  const auto res = lp::solve_audited(problem, ao);
  json doc = json::parse(lp::solution_json(problem, res.solution));
  doc["audited"] = res.audited;
  doc["audit_method"] = res.audit.method;
  const fs::path path = c.output.empty() ? fs::path(c.lp_file).replace_extension(".solution.json") : fs::path(c.output);
  write_file(path, doc.dump(2));
  out << lp::to_string(res.status) << (res.audited ? " (audited)" : " (unaudited)") << "\nwrote " << path.string()
      << '\n';
  return 0;
}

int cmd_lattice_gen(const Config& c, std::ostream& out) {
  ObservationVariant variant = ObservationVariant::Label;
  if (c.variant == "hypothesis") variant = ObservationVariant::Hypothesis;
  else if (c.variant != "label") throw ConfigError("variant must be label or hypothesis");
  const auto pomdp = lattice_generator(c.rows, c.cols, parse_cell(c.h0), parse_cell(c.target), variant);
  const fs::path path = c.output.empty()
                            ? fs::path(c.out_dir) / ("lattice-" + std::to_string(c.rows) + "x" + std::to_string(c.cols) + ".json")
                            : fs::path(c.output);
  write_file(path, scenario_json(pomdp));
  out << "wrote " << path.string() << " (digest " << pomdp_digest(pomdp) << ")\n";
  return 0;
}

unsigned env_jobs() {
  if (const char* v = std::getenv("TEACHCERT_JOBS")) {
    try {
      return static_cast<unsigned>(std::stoul(v));
    } catch (const std::exception&) {
      throw ConfigError("TEACHCERT_JOBS must be a non-negative integer");
    }
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Barrier-certificate verification of machine teaching"};
  app.require_subcommand(1);
  Config c;
  std::optional<unsigned> jobs;

  auto common = [&](CLI::App* s) {
    s->add_option("--out", c.out_dir, "Output directory for reports")->capture_default_str();
    s->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    s->add_option("--jobs", jobs, "Worker threads (0 = all cores; default TEACHCERT_JOBS)");
  };
  auto scenario = [&](CLI::App* s) { s->add_option("--scenario", c.scenario, "Scenario JSON file")->required(); };
  auto certificate_flags = [&](CLI::App* s) {
    s->add_option("--lambda", c.lambda, "Teaching performance in [0, 1]")->capture_default_str();
    s->add_option("--degree", c.degree, "Certificate degree (even)")->capture_default_str();
    s->add_flag("--no-simplex-multipliers", c.no_simplex, "Require nonnegativity on all of R^n");
    s->add_flag("--paper-faithful", c.paper_faithful, "Global DSOS multipliers and per-region certificates");
    s->add_option("--coupling", c.coupling, "Policy certificates: shared or independent")
        ->check(CLI::IsMember({"shared", "independent"}))
        ->capture_default_str();
    s->add_option("--policy", c.policy, "myopic | ada-l | always:<z> | policy file");
  };
  auto verify_flags = [&](CLI::App* s) {
    s->add_option("--mode", c.mode, "arbitrary | per-example | policy")
        ->check(CLI::IsMember({"arbitrary", "per-example", "policy"}))
        ->capture_default_str();
    s->add_flag("--exact-lp", c.exact_lp, "Solve every LP in exact arithmetic");
    s->add_flag("--escalate", c.escalate, "Retry unknown verdicts at higher degree");
    s->add_option("--degree-cap", c.degree_cap, "Highest escalation degree")->capture_default_str();
    s->add_option("--row-budget", c.row_budget, "Largest LP attempted (rows)")->capture_default_str();
    s->add_option("--trajectories", c.trajectories, "Sampled runs for audit and plot data")->capture_default_str();
    s->add_flag("--csv", c.csv, "Write B(t, b_t) plot data");
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo teaching");
  common(simulate);
  scenario(simulate);
  simulate->add_option("--policy", c.policy, "myopic | ada-l | always:<z> | policy file")->required();
  simulate->add_option("--runs", c.runs)->capture_default_str();
  simulate->add_option("--horizon", c.horizon)->capture_default_str();
  simulate->add_flag("--version-space", c.version_space, "Also sample a version-space learner");
  simulate->add_flag("--csv", c.csv, "Write success curve as CSV");

  auto* verify_cmd = app.add_subcommand("verify", "One (lambda, t*) verdict");
  common(verify_cmd);
  scenario(verify_cmd);
  certificate_flags(verify_cmd);
  verify_flags(verify_cmd);
  verify_cmd->add_option("--t", c.t, "Number of trials t*")->capture_default_str();

  auto* min_cmd = app.add_subcommand("min-trials", "Smallest verified t*, descending from t_max");
  common(min_cmd);
  scenario(min_cmd);
  certificate_flags(min_cmd);
  verify_flags(min_cmd);
  min_cmd->add_option("--t-max", c.t_max)->capture_default_str();
  min_cmd->add_flag("--fresh", c.fresh, "Ignore archived verdicts");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exact reachable-belief check with witness");
  common(oracle_cmd);
  scenario(oracle_cmd);
  oracle_cmd->add_option("--lambda", c.lambda)->capture_default_str();
  oracle_cmd->add_option("--t", c.t)->capture_default_str();
  oracle_cmd->add_option("--mode", c.mode, "arbitrary | policy")->capture_default_str();
  oracle_cmd->add_option("--policy", c.policy);
  oracle_cmd->add_option("--node-budget", c.node_budget)->capture_default_str();
  oracle_cmd->add_flag("--merge", c.merge, "Merge identical beliefs per level");

  auto* export_cmd = app.add_subcommand("export-lp", "Write DSOS programs as LP files");
  common(export_cmd);
  scenario(export_cmd);
  certificate_flags(export_cmd);
  export_cmd->add_option("--t", c.t)->capture_default_str();
  export_cmd->add_option("--program", c.program, "monolithic | per-example | policy")->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve-lp", "Solve an exported LP file and write its solution");
  common(solve_cmd);
  solve_cmd->add_option("lp", c.lp_file, "LP file")->required();
  solve_cmd->add_flag("--exact-lp", c.exact_lp);
  solve_cmd->add_option("--output", c.output, "Solution JSON path");

  auto* lattice_cmd = app.add_subcommand("lattice-gen", "Write a lattice scenario file");
  common(lattice_cmd);
  lattice_cmd->add_option("--rows", c.rows)->capture_default_str();
  lattice_cmd->add_option("--cols", c.cols)->capture_default_str();
  lattice_cmd->add_option("--h0", c.h0, "Start cell row,col (1-based)")->capture_default_str();
  lattice_cmd->add_option("--target", c.target, "Target cell row,col (1-based)")->capture_default_str();
  lattice_cmd->add_option("--variant", c.variant, "label | hypothesis")->capture_default_str();
  lattice_cmd->add_option("--output", c.output, "Scenario path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? 0 : 2;
  }

  try {
    c.jobs = jobs ? *jobs : env_jobs();
    const bool coupling_given =
        verify_cmd->count("--coupling") + min_cmd->count("--coupling") + export_cmd->count("--coupling") > 0;
    if (c.paper_faithful && coupling_given && c.coupling == "shared")
      throw ConfigError("--paper-faithful uses independent per-region certificates; drop --coupling shared");
    if (c.degree % 2 != 0) throw OddDegree("--degree must be even");
    if (c.t < 1 || c.t_max < 1) throw ConfigError("trial counts must be at least 1");
    if (c.mode == "policy" && c.policy.empty())
      throw ConfigError("--mode policy needs --policy");

    if (app.got_subcommand(simulate)) return cmd_simulate(c, out);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(c, out);
    if (app.got_subcommand(min_cmd)) return cmd_min_trials(c, out);
    if (app.got_subcommand(oracle_cmd)) return cmd_oracle(c, out);
    if (app.got_subcommand(export_cmd)) return cmd_export_lp(c, out);
    if (app.got_subcommand(solve_cmd)) return cmd_solve_lp(c, out);
    if (app.got_subcommand(lattice_cmd)) return cmd_lattice_gen(c, out);
  } catch (const AuditFailed& e) {
    err << "audit failed: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const SchemaError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidPerformance& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const OddDegree& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const OutOfBounds& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionMismatch& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace teachcert::cli
