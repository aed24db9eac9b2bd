#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "teachcert/model.hpp"
#include "teachcert/policies.hpp"
#include "teachcert/verify.hpp"

namespace teachcert {

/// Run parameters echoed into every report.
struct ReportContext {
  std::string command;
  std::string mode;
  Rational lambda = 0;
  unsigned t_star = 0;
  unsigned degree = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> flags;
};

/// Barrier polynomials, labels and per-program audit methods.
std::string certificate_json(const Certificate& cert);

/// Full verification report. Timing fields are the only non-deterministic ones.
std::string verdict_report(const LearningPomdp& pomdp, const Verdict& verdict, const ReportContext& ctx);

std::string min_trials_report(const LearningPomdp& pomdp, const MinTrialsResult& result, const ReportContext& ctx);

std::string simulation_report(const LearningPomdp& pomdp, const SimulationResult& result, const ReportContext& ctx);

/// Columns t, success_fraction, mean_target_belief.
std::string simulation_csv(const SimulationResult& result);

}  // namespace teachcert
