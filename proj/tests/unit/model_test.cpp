#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "teachcert/errors.hpp"
#include "teachcert/model.hpp"

namespace teachcert {
namespace {

using testing::Rng;
using testing::toy_pomdp;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kToyPath = std::string(TEACHCERT_TEST_DATA) + "/toy.json";

TEST(TransitionKernel, ToySeparatingExampleMovesToConsistentHypothesis) {
  const auto p = toy_pomdp();
  EXPECT_EQ(p.T()(0, 0, 0), 1);
  EXPECT_EQ(p.T()(1, 0, 0), 1);
  EXPECT_EQ(p.T()(1, 0, 1), 0);
}

TEST(TransitionKernel, ToyUninformativeExampleKeepsHypothesis) {
  const auto p = toy_pomdp();
  EXPECT_EQ(p.T()(0, 1, 0), 1);
  EXPECT_EQ(p.T()(1, 1, 1), 1);
}

TEST(TransitionKernel, ZeroPreferenceSpreadsUniformly) {
  HypothesisSpace space{{{0, {1}}, {1, {1}}}, 1};
  const auto sigma = PreferenceFunction::explicit_table({{0, 0}, {0, 0}});
  const auto T = build_transition_kernel(space, sigma, {{0, 1}});
  for (std::size_t h = 0; h < 2; ++h)
    for (std::size_t h2 = 0; h2 < 2; ++h2) EXPECT_EQ(T(h, 0, h2), Rational(1, 2));
}

TEST(TransitionKernel, InconsistentExampleIsRejected) {
  HypothesisSpace space{{{0, {1}}, {1, {1}}}, 1};
  EXPECT_THROW(build_transition_kernel(space, PreferenceFunction::win_stay_lose_shift(2), {{0, -1}}),
               EmptyVersionSpace);
}

TEST(ObservationKernel, ToyLabels) {
  const auto p = toy_pomdp();
  // observation 0 is +1, observation 1 is -1
  EXPECT_TRUE(p.O()(0, 0, 0));
  EXPECT_FALSE(p.O()(1, 0, 0));
  EXPECT_FALSE(p.O()(0, 1, 0));
  EXPECT_TRUE(p.O()(1, 1, 0));
  EXPECT_TRUE(p.O()(0, 0, 1));
  EXPECT_TRUE(p.O()(0, 1, 1));
}

TEST(ObservationKernel, HypothesisFeedbackRevealsLearner) {
  const auto p = lattice_generator(2, 2, {1, 1}, {2, 2}, ObservationVariant::Hypothesis);
  EXPECT_EQ(p.num_observations(), 4u);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t h = 0; h < 4; ++h) EXPECT_EQ(p.O()(y, h, 0), y == h);
}

TEST(VersionSpace, ToyCases) {
  const auto p = toy_pomdp();
  EXPECT_EQ(version_space(p.space(), {}), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(version_space(p.space(), {p.examples()[0]}), (std::vector<std::size_t>{0}));
  EXPECT_EQ(version_space(p.space(), {p.examples()[0], p.examples()[1]}), (std::vector<std::size_t>{0}));
}

TEST(Lattice, FourByFourReproductionSetup) {
  const auto p = lattice_generator(4, 4, {1, 1}, {3, 4});
  EXPECT_EQ(p.num_hypotheses(), 16u);
  EXPECT_EQ(p.num_examples(), 16u);
  EXPECT_EQ(p.labels().size(), 2u);
  EXPECT_EQ(p.target(), 11u);
  EXPECT_EQ(p.p0()[0], 1);
  for (std::size_t h = 1; h < 16; ++h) EXPECT_EQ(p.p0()[h], 0);
  for (std::size_t z = 0; z < 16; ++z) EXPECT_EQ(p.examples()[z].y_star, z == 11 ? 1 : -1);
}

TEST(Lattice, DegenerateAndTwoCell) {
  const auto one = lattice_generator(1, 1, {1, 1}, {1, 1});
  EXPECT_EQ(one.num_hypotheses(), 1u);
  EXPECT_EQ(one.p0(), RationalVector{1});
  const auto two = lattice_generator(2, 1, {1, 1}, {2, 1});
  const auto& table = two.preference().table();
  EXPECT_EQ(table, (std::vector<RationalVector>{{0, 1}, {1, 0}}));
}

TEST(Lattice, OutOfBoundsCoordinates) {
  EXPECT_THROW(lattice_generator(4, 4, {0, 1}, {3, 4}), OutOfBounds);
  EXPECT_THROW(lattice_generator(4, 4, {1, 1}, {5, 4}), OutOfBounds);
}

TEST(Lattice, PreferenceIsAMetric) {
  const auto p = lattice_generator(4, 4, {1, 1}, {3, 4});
  const auto& s = p.preference();
  for (std::size_t a = 0; a < 16; ++a) {
    EXPECT_EQ(s(a, a), 0);
    for (std::size_t b = 0; b < 16; ++b) {
      EXPECT_EQ(s(a, b), s(b, a));
      for (std::size_t c = 0; c < 16; ++c) EXPECT_LE(s(a, c), s(a, b) + s(b, c));
    }
  }
}

TEST(Scenario, ToyDocumentMatchesInMemoryConstruction) {
  const auto loaded = load_pomdp(read_file(kToyPath));
  const auto built = toy_pomdp();
  EXPECT_EQ(pomdp_digest(loaded), pomdp_digest(built));
  EXPECT_EQ(scenario_json(loaded), scenario_json(built));
}

TEST(Scenario, RoundTripPreservesDigest) {
  const auto p = lattice_generator(3, 2, {1, 1}, {3, 2});
  EXPECT_EQ(pomdp_digest(load_pomdp(scenario_json(p))), pomdp_digest(p));
}

TEST(Scenario, PriorOffTheSimplex) {
  std::string doc = read_file(kToyPath);
  doc.replace(doc.find("[\"1/2\", \"1/2\"]"), 14, "[\"0.6\", \"0.5\"]");
  EXPECT_THROW(load_pomdp(doc), InvariantViolation);
}

TEST(Scenario, MissingAndUnknownFields) {
  EXPECT_THROW(load_pomdp(R"({"hypotheses": [[1]], "labels": [1, -1]})"), SchemaError);
  std::string doc = read_file(kToyPath);
  doc.insert(doc.rfind('}'), R"(, "colour": "blue")");
  EXPECT_THROW(load_pomdp(doc), SchemaError);
  EXPECT_THROW(load_pomdp("not json"), SchemaError);
}

TEST(Scenario, ValidTransitionOverrideIsKeptVerbatim) {
  std::string doc = read_file(kToyPath);
  // Same support as the derived kernel, so it is consistent with the preference.
  const std::string T = R"(, "T_override": [[["1", "0"], ["1", "0"]], [["1", "0"], ["0", "1"]]])";
  doc.insert(doc.rfind('}'), T);
  const auto p = load_pomdp(doc);
  EXPECT_TRUE(p.has_transition_override());
  EXPECT_EQ(p.T()(1, 0, 0), 1);
}

TEST(Scenario, NonStochasticOverrideIsRejected) {
  std::string doc = read_file(kToyPath);
  const std::string T = R"(, "T_override": [[["1/2", "0"], ["1", "0"]], [["1", "0"], ["0", "1"]]])";
  doc.insert(doc.rfind('}'), T);
  EXPECT_THROW(load_pomdp(doc), InvariantViolation);
}

// Kernel invariants over random instances.
TEST(ModelProperties, KernelsAreStochasticAndSupported) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testing::random_pomdp(rng);
    const std::size_t n = p.num_hypotheses();
    for (std::size_t z = 0; z < p.num_examples(); ++z) {
      const auto vs = version_space(p.space(), {p.examples()[z]});
      for (std::size_t h = 0; h < n; ++h) {
        Rational sum = 0;
        std::optional<Rational> level;
        for (std::size_t h2 = 0; h2 < n; ++h2) {
          const Rational& v = p.T()(h, z, h2);
          sum += v;
          if (v == 0) continue;
          EXPECT_NE(std::find(vs.begin(), vs.end(), h2), vs.end());
          if (level) EXPECT_EQ(v, *level);
          level = v;
        }
        EXPECT_EQ(sum, 1);
      }
      for (std::size_t h2 = 0; h2 < n; ++h2) {
        int emitted = 0;
        for (std::size_t y = 0; y < p.num_observations(); ++y) emitted += p.O()(y, h2, z);
        EXPECT_EQ(emitted, 1);
      }
    }
  }
}

}  // namespace
}  // namespace teachcert
