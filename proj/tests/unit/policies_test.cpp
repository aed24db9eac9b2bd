#include <numeric>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "teachcert/errors.hpp"
#include "teachcert/oracle.hpp"
#include "teachcert/policies.hpp"

namespace teachcert {
namespace {

using testing::Rng;
using testing::toy_pomdp;

TEST(Myopic, ToyFromWrongHypothesisPicksSeparatingExample) {
  const auto p = toy_pomdp();
  EXPECT_EQ(target_rank(p, 1, {0}), 1u);
  EXPECT_EQ(target_rank(p, 1, {0, 1}), 2u);
  EXPECT_EQ(myopic_select(p, 1, {}), 0u);
}

TEST(Myopic, AtTargetTieBreaksToLowestIndex) {
  EXPECT_EQ(myopic_select(toy_pomdp(), 0, {}), 0u);
}

TEST(AdaL, ToyFromWrongHypothesisPicksSeparatingExample) {
  const auto p = toy_pomdp();
  EXPECT_EQ(next_hypotheses(p, 1, {}, 0), std::vector<std::size_t>{0});
  EXPECT_EQ(adal_select(p, 1, {}), 0u);
}

TEST(AdaL, AtTargetKeepsDistanceZero) {
  const auto p = toy_pomdp();
  const auto z = adal_select(p, 0, {});
  for (auto h : next_hypotheses(p, 0, {}, z)) EXPECT_EQ(h, 0u);
}

TEST(AdaL, LatticeWalkApproachesTarget) {
  const auto p = lattice_generator(4, 4, {1, 1}, {3, 4});
  const auto shape = *p.preference().lattice();
  const auto walk = learner_walk(p, AdaptivePolicy::ada_l(), 16, 3, WalkVariant::Memoryless);
  int previous = shape.l1(walk.hypotheses.front(), p.target());
  for (auto h : walk.hypotheses) {
    const int now = shape.l1(h, p.target());
    EXPECT_LE(now, previous);
    previous = now;
  }
  EXPECT_EQ(walk.hypotheses.back(), p.target());
}

TEST(Partition, MergedSingleRegion) {
  const auto p = toy_pomdp();
  const auto part = policy_to_partition(p, AdaptivePolicy::custom({0, 0}));
  ASSERT_EQ(part.size(), 1u);
  EXPECT_EQ(part.regions[0].example, 0u);
  EXPECT_EQ(part.example_at(Belief::exact({Rational(1, 3), Rational(2, 3)})), 0u);
}

TEST(Partition, TwoHalfSimplexCells) {
  const auto p = toy_pomdp();
  const auto part = policy_to_partition(p, AdaptivePolicy::custom({1, 0}));
  ASSERT_EQ(part.size(), 2u);
  EXPECT_EQ(part.example_at(Belief::exact({Rational(3, 4), Rational(1, 4)})), 1u);
  EXPECT_EQ(part.example_at(Belief::exact({Rational(1, 4), Rational(3, 4)})), 0u);
  for (const auto& r : part.regions)
    for (const auto& g : r.inequalities) EXPECT_LE(g.degree(), 1);
  EXPECT_NO_THROW(validate_partition(p, part));
}

TEST(Partition, ConstantSelectorOnLattice) {
  const auto p = lattice_generator(4, 4, {1, 1}, {3, 4});
  EXPECT_EQ(policy_to_partition(p, AdaptivePolicy::custom(std::vector<std::size_t>(16, 5))).size(), 1u);
}

TEST(Partition, UncoveredPolicyIsRejected) {
  const auto p = toy_pomdp();
  PartitionPolicy gap;
  gap.regions = {{{Poly::variable(2, 0) - Poly::constant(2, Rational(1, 4))}, 0}};
  EXPECT_THROW(validate_partition(p, gap, 1000), InvariantViolation);
  EXPECT_THROW(gap.example_at(Belief::exact({Rational(1, 2), Rational(1, 2)})), InvariantViolation);
}

TEST(Simulation, ToyAlwaysSeparatingSucceedsAfterOneStep) {
  const auto p = toy_pomdp();
  const auto r = simulate_teaching(p, PartitionPolicy::constant(2, 0), 500, 1, 9);
  EXPECT_DOUBLE_EQ(r.success_fraction(1), 1.0);
  EXPECT_DOUBLE_EQ(r.mean_target_belief[1], 1.0);
}

TEST(Simulation, HorizonZeroIsInitialIndicator) {
  const auto p = toy_pomdp({1, 0});
  EXPECT_DOUBLE_EQ(simulate_teaching(p, PartitionPolicy::constant(2, 1), 100, 0, 1).success_fraction(0), 1.0);
  const auto q = toy_pomdp({0, 1});
  EXPECT_DOUBLE_EQ(simulate_teaching(q, PartitionPolicy::constant(2, 1), 100, 0, 1).success_fraction(0), 0.0);
}

TEST(PolicyFile, KindsAndRegions) {
  EXPECT_TRUE(load_policy(R"({"kind": "ada-l"})", 2).adaptive.has_value());
  EXPECT_EQ(load_policy(R"({"kind": "table", "table": [1, 0]})", 2).adaptive->table, (std::vector<std::size_t>{1, 0}));
  const auto part = policy_to_partition(toy_pomdp(), AdaptivePolicy::custom({1, 0}));
  const auto back = load_policy(policy_json(part), 2);
  ASSERT_TRUE(back.partition.has_value());
  EXPECT_EQ(back.partition->size(), 2u);
  EXPECT_EQ(back.partition->regions[0].inequalities, part.regions[0].inequalities);
  EXPECT_THROW(load_policy(R"({"kind": "greedy"})", 2), SchemaError);
}

// Randomized policy invariants.
TEST(PolicyProperties, PartitionsCoverTheSimplex) {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = testing::random_pomdp(rng);
    for (const auto& adaptive : {AdaptivePolicy::myopic(), AdaptivePolicy::ada_l()}) {
      const auto part = policy_to_partition(p, adaptive);
      for (int s = 0; s < 10000 / 30; ++s) {
        std::vector<double> w(p.num_hypotheses());
        double total = 0;
        for (auto& v : w) total += v = std::exponential_distribution<double>(1.0)(rng);
        for (auto& v : w) v /= total;
        EXPECT_TRUE(part.region_of(w).has_value());
      }
    }
  }
}

TEST(PolicyProperties, RankBoundsAndMonotonicity) {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing::random_pomdp(rng);
    const std::size_t h = testing::uniform_index(rng, p.num_hypotheses());
    std::vector<std::size_t> all(p.num_hypotheses());
    std::iota(all.begin(), all.end(), 0);
    const auto full = target_rank(p, h, all);
    EXPECT_LE(full, p.num_hypotheses());
    EXPECT_GE(full, 1u);
    for (std::size_t z = 0; z < p.num_examples(); ++z) {
      const auto vs = version_space(p.space(), {p.examples()[z]});
      EXPECT_LE(target_rank(p, h, vs), full);
    }
  }
}

TEST(PolicyProperties, AdaLNeverWorsensWhenAvoidable) {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing::random_pomdp(rng);
    const auto& s = p.preference();
    const std::size_t h = testing::uniform_index(rng, p.num_hypotheses());
    auto worst = [&](std::size_t z) {
      Rational w = -1;
      for (auto next : next_hypotheses(p, h, {}, z)) w = std::max(w, s(p.target(), next));
      return w;
    };
    const Rational now = s(p.target(), h);
    bool avoidable = false;
    for (std::size_t z = 0; z < p.num_examples(); ++z) avoidable = avoidable || worst(z) <= now;
    if (avoidable) EXPECT_LE(worst(adal_select(p, h, {})), now);
  }
}

TEST(PolicyProperties, SimulationIsSeedDeterministic) {
  const auto p = lattice_generator(3, 3, {1, 1}, {3, 3});
  const auto part = policy_to_partition(p, AdaptivePolicy::ada_l());
  const auto a = simulate_teaching(p, part, 200, 6, 77, 1);
  const auto b = simulate_teaching(p, part, 200, 6, 77, 4);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.mean_target_belief, b.mean_target_belief);
}

}  // namespace
}  // namespace teachcert
