#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "teachcert/belief.hpp"
#include "teachcert/model.hpp"
#include "teachcert/policies.hpp"

namespace teachcert {

/// Reachable belief after `t` trials along `path`.
struct BeliefNode {
  Belief belief;
  unsigned t = 0;
  std::vector<PlanStep> path;
  Rational path_probability = 1;  // product of the observation probabilities R(b)
};

enum class OracleMode { Arbitrary, FixedPolicy };

struct EnumerateOptions {
  std::size_t node_budget = 1'000'000;
  /// Collapse nodes with identical beliefs at each depth (probabilities add,
  /// the lexicographically first path is kept).
  bool merge_duplicates = false;
  unsigned jobs = 1;
};

/// Leaves of the reachable belief tree at depth t_star. Zero-probability
/// observations are pruned. FixedPolicy mode needs `policy`.
/// Throws BudgetExceeded carrying the deepest fully expanded level.
std::vector<BeliefNode> enumerate(const LearningPomdp& pomdp, unsigned t_star, OracleMode mode,
                                  const PartitionPolicy* policy = nullptr, const EnumerateOptions& options = {});

struct PerformanceCheck {
  bool holds = false;
  BeliefNode worst;
};

/// holds iff every leaf has b(h_star) >= lambda; `worst` minimizes b(h_star)
/// (first such leaf in enumeration order).
PerformanceCheck check_performance(const std::vector<BeliefNode>& leaves, std::size_t h_star,
                                   const Rational& lambda);

enum class WalkVariant {
  Memoryless,  // learner jumps by T from its current hypothesis
  Accumulated  // learner keeps the version space of everything shown so far
};

struct LearnerWalk {
  std::vector<std::size_t> hypotheses;  // h_0 .. h_steps
  std::vector<std::size_t> examples;    // z_1 .. z_steps
};

/// Samples the learner's hypothesis chain under an adaptive teacher that sees
/// the learner's hypothesis. Accumulated walks pass the teaching history to
/// the selector; memoryless walks do not.
LearnerWalk learner_walk(const LearningPomdp& pomdp, const AdaptivePolicy& policy, std::size_t steps,
                         std::uint64_t seed, WalkVariant variant);

/// JSON {path, leaf_belief, path_probability, t}.
std::string witness_json(const LearningPomdp& pomdp, const BeliefNode& node);

}  // namespace teachcert
