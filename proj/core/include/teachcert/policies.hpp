#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teachcert/belief.hpp"
#include "teachcert/model.hpp"
#include "teachcert/polynomial.hpp"

namespace teachcert {

/// Belief region {b : g(b) <= 0 for every g} with the example taught there.
struct PolicyRegion {
  std::vector<Poly> inequalities;
  std::size_t example = 0;
};

/// Teaching policy pi: B -> Z given by semialgebraic regions. When regions
/// overlap, the first region containing the belief decides.
struct PartitionPolicy {
  std::vector<PolicyRegion> regions;

  std::size_t size() const { return regions.size(); }
  static PartitionPolicy constant(std::size_t num_hypotheses, std::size_t example);

  std::optional<std::size_t> region_of(const RationalVector& b) const;
  std::optional<std::size_t> region_of(const std::vector<double>& b, double tol = 1e-12) const;
  /// Example chosen at b; throws InvariantViolation when no region contains b.
  std::size_t example_at(const Belief& b) const;
};

/// Checks ring sizes, example indices, simplex vertices and `samples`
/// random simplex points for coverage. Throws InvariantViolation.
void validate_partition(const LearningPomdp& pomdp, const PartitionPolicy& policy,
                        std::size_t samples = 10000, std::uint64_t seed = 7);

enum class PolicyKind { Myopic, AdaL, CustomTable };

/// Example selector keyed on the learner's current hypothesis.
struct AdaptivePolicy {
  PolicyKind kind = PolicyKind::Myopic;
  std::vector<std::size_t> table;  // CustomTable: hypothesis -> example

  static AdaptivePolicy myopic() { return {PolicyKind::Myopic, {}}; }
  static AdaptivePolicy ada_l() { return {PolicyKind::AdaL, {}}; }
  static AdaptivePolicy custom(std::vector<std::size_t> table) {
    return {PolicyKind::CustomTable, std::move(table)};
  }

  std::size_t select(const LearningPomdp& pomdp, std::size_t current_h,
                     const std::vector<std::size_t>& shown) const;
  std::string name() const;
};

/// 1-based rank of the target inside `members`, ordered by sigma(.; current_h)
/// with ties broken by hypothesis index.
std::size_t target_rank(const LearningPomdp& pomdp, std::size_t current_h,
                        const std::vector<std::size_t>& members);

/// Hypotheses the learner may jump to from current_h after seeing z on top of
/// `shown` (sigma-minimizers inside the version space).
std::vector<std::size_t> next_hypotheses(const LearningPomdp& pomdp, std::size_t current_h,
                                         const std::vector<std::size_t>& shown, std::size_t z);

/// Example minimizing the worst-case rank of the target in the next version
/// space; ties go to the lowest example index.
std::size_t myopic_select(const LearningPomdp& pomdp, std::size_t current_h,
                          const std::vector<std::size_t>& shown);

/// Example minimizing the worst-case sigma-distance to the target over the
/// learner's next-hypothesis set; ties go to the lowest example index.
std::size_t adal_select(const LearningPomdp& pomdp, std::size_t current_h,
                        const std::vector<std::size_t>& shown);

/// Argmax-belief cells {b : b(h_j) - b(h_i) <= 0 for all j}, one per
/// hypothesis, labeled with selector(h_i); cells sharing an example merge.
PartitionPolicy policy_to_partition(const LearningPomdp& pomdp, const AdaptivePolicy& adaptive);

struct SimulationResult {
  std::size_t runs = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  /// successes[t]: runs whose learner holds the target after t examples.
  std::vector<std::size_t> successes;
  /// Mean teacher belief in the target after t examples.
  std::vector<double> mean_target_belief;

  double success_fraction(std::size_t t) const {
    return runs ? static_cast<double>(successes[t]) / static_cast<double>(runs) : 0.0;
  }
};

/// Monte Carlo teaching runs. The teacher tracks its belief from the observed
/// feedback and teaches policy.example_at(belief); the learner starts from a
/// draw of p0 and jumps by T. Run r uses its own stream seeded by (seed, r).
SimulationResult simulate_teaching(const LearningPomdp& pomdp, const PartitionPolicy& policy,
                                   std::size_t runs, std::size_t horizon, std::uint64_t seed,
                                   unsigned jobs = 1);

// Policy files (JSON): {"kind": "myopic" | "ada-l"}, {"kind": "table", "table": [...]}
// or {"regions": [{"inequalities": [poly...], "example": z}]}.
struct PolicyFile {
  std::optional<AdaptivePolicy> adaptive;
  std::optional<PartitionPolicy> partition;
};
PolicyFile load_policy(const std::string& document, std::size_t num_hypotheses);
std::string policy_json(const PartitionPolicy& policy);

}  // namespace teachcert
