#include "teachcert/report.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace teachcert {

namespace {

using nlohmann::json;

json context_json(const LearningPomdp& pomdp, const ReportContext& ctx) {
  json flags = json::object();
  for (const auto& [k, v] : ctx.flags) flags[k] = v;
  return json{{"command", ctx.command},
              {"pomdp_digest", pomdp_digest(pomdp)},
              {"mode", ctx.mode},
              {"lambda", to_string(ctx.lambda)},
              {"t_star", ctx.t_star},
              {"degree", ctx.degree},
              {"seed", ctx.seed},
              {"flags", flags}};
}

json program_json(const ProgramRecord& rec) {
  json multipliers = json::object();
  const auto& vars = rec.program.vars.all();
  for (std::size_t v = 0; v < vars.size() && v < rec.assignment.size(); ++v)
    if (vars[v].kind == VarKind::Multiplier && rec.assignment[v] != 0) multipliers[vars[v].name] = to_string(rec.assignment[v]);
  return json{{"name", rec.program.name},
              {"audit", rec.audit_method},
              {"columns", vars.size()},
              {"constraints", rec.program.constraints.size() + rec.program.linear.size()},
              {"multipliers", multipliers}};
}

json diagnostic_json(const ProgramDiagnostic& d) {
  return json{{"program", d.program},
              {"rows", d.rows},
              {"columns", d.columns},
              {"decrease_constraints", d.decrease_constraints},
              {"vacuous_constraints", d.vacuous_constraints},
              {"status", d.status},
              {"audited", d.audited},
              {"audit_method", d.audit_method},
              {"log", d.log},
              {"seconds", d.seconds}};
}

json verdict_json(const Verdict& v) {
  json diags = json::array();
  for (const auto& d : v.diagnostics) diags.push_back(diagnostic_json(d));
  json out{{"outcome", to_string(v.outcome)}, {"degree", v.degree}, {"note", v.note}, {"diagnostics", diags},
           {"wall_clock_seconds", v.seconds}};
  if (v.certificate) out["certificate"] = json::parse(certificate_json(*v.certificate));
  return out;
}

}  // namespace

std::string certificate_json(const Certificate& cert) {
  json barriers = json::array();
  for (std::size_t i = 0; i < cert.barriers.size(); ++i)
    barriers.push_back({{"label", cert.labels.at(i)}, {"terms", json::parse(serialize(cert.barriers[i]))}});
  json programs = json::array();
  for (const auto& rec : cert.programs) programs.push_back(program_json(rec));
  if (cert.composition)
    for (const auto& rec : cert.composition->parts) programs.push_back(program_json(rec));
  return json{{"kind", to_string(cert.kind)},
              {"lambda", to_string(cert.lambda)},
              {"t_star", cert.t_star},
              {"degree", cert.degree},
              {"composite", cert.labels.at(cert.composite)},
              {"barriers", barriers},
              {"programs", programs}}
      .dump(2);
}

std::string verdict_report(const LearningPomdp& pomdp, const Verdict& verdict, const ReportContext& ctx) {
  json out = context_json(pomdp, ctx);
  out["verdict"] = verdict_json(verdict);
  return out.dump(2);
}

std::string min_trials_report(const LearningPomdp& pomdp, const MinTrialsResult& result, const ReportContext& ctx) {
  json out = context_json(pomdp, ctx);
  out["min_t_star"] = result.t_star ? json(*result.t_star) : json(nullptr);
  json attempts = json::array();
  for (const auto& [t, v] : result.attempts) {
    json a = verdict_json(v);
    a["t_star"] = t;
    attempts.push_back(std::move(a));
  }
  out["attempts"] = attempts;
  return out.dump(2);
}

std::string simulation_report(const LearningPomdp& pomdp, const SimulationResult& result, const ReportContext& ctx) {
  json out = context_json(pomdp, ctx);
  json rows = json::array();
  for (std::size_t t = 0; t < result.successes.size(); ++t)
    rows.push_back({{"t", t},
                    {"successes", result.successes[t]},
                    {"success_fraction", result.success_fraction(t)},
                    {"mean_target_belief", result.mean_target_belief.at(t)}});
  out["runs"] = result.runs;
  out["horizon"] = result.horizon;
  out["trajectory"] = rows;
  return out.dump(2);
}

std::string simulation_csv(const SimulationResult& result) {
  std::ostringstream os;
  os << "t,success_fraction,mean_target_belief\n";
  for (std::size_t t = 0; t < result.successes.size(); ++t)
    os << t << ',' << result.success_fraction(t) << ',' << result.mean_target_belief.at(t) << '\n';
  return os.str();
}

}  // namespace teachcert
