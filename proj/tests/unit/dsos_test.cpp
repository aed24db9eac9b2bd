#include <gtest/gtest.h>

#include "generators.hpp"
#include "teachcert/dsos.hpp"
#include "teachcert/errors.hpp"
#include "teachcert/lp.hpp"

namespace teachcert {
namespace {

using testing::Rng;
using testing::toy_pomdp;

struct Encoded {
  DsosProgram program;
  lp::AuditedResult result;
};

Encoded encode_and_solve(const Poly& target, bool homogeneous = false) {
  Encoded e;
  e.program.name = "single";
  e.program.constraints.push_back(dsos_encode(PolyTemplate(target), e.program.vars, "c", std::nullopt, homogeneous));
  e.result = lp::solve_audited(e.program.to_lp());
  return e;
}

Poly b(std::size_t i) { return Poly::variable(2, i); }

TEST(DsosEncode, SumOfSquaresIsFeasible) {
  const auto e = encode_and_solve(b(0) * b(0) + b(1) * b(1));
  ASSERT_EQ(e.result.status, lp::Status::Feasible);
  EXPECT_TRUE(e.result.audited);
}

TEST(DsosEncode, BareCrossTermIsInfeasible) {
  const auto e = encode_and_solve(b(0) * b(1));
  EXPECT_EQ(e.result.status, lp::Status::Infeasible);
  EXPECT_TRUE(e.result.audited);
}

TEST(DsosEncode, PerfectSquareRecoversDominantGram) {
  const Poly square = (b(0) - b(1)) * (b(0) - b(1));
  const auto e = encode_and_solve(square);
  ASSERT_EQ(e.result.status, lp::Status::Feasible);
  const auto& c = e.program.constraints[0];
  const auto gram = recover_gram(c, e.result.audit.assignment);
  EXPECT_TRUE(diagonally_dominant(gram));
  EXPECT_EQ(gram_polynomial(c, gram), square);
}

TEST(DsosEncode, OddDegreeIsRejected) {
  VarRegistry vars;
  EXPECT_THROW(dsos_encode(PolyTemplate(b(0) * b(0) * b(1)), vars, "odd"), OddDegree);
}

TEST(DsosEncode, HomogeneousCrossTermHoldsOnTheOrthant) {
  // b1 b2 >= 0 on the orthant even though it is not globally nonnegative.
  const auto e = encode_and_solve(b(0) * b(1), true);
  EXPECT_EQ(e.result.status, lp::Status::Feasible);
}

TEST(Assemble, InvalidPerformance) {
  const auto p = toy_pomdp();
  EXPECT_THROW(assemble_monolithic(p, Rational(-1, 10), 1, 2), InvalidPerformance);
  EXPECT_THROW(assemble_monolithic(p, Rational(11, 10), 1, 2), InvalidPerformance);
  EXPECT_THROW(assemble_monolithic(p, Rational(1, 2), 1, 3), OddDegree);
}

TEST(Assemble, DecreaseConstraintCounts) {
  const auto p = toy_pomdp();
  for (unsigned t = 1; t <= 3; ++t) {
    const auto mono = assemble_monolithic(p, Rational(1, 2), t, 2);
    EXPECT_EQ(mono.decrease_constraints, t * 2 * 2);
    const auto per = assemble_per_example(p, Rational(1, 2), t, 2);
    ASSERT_EQ(per.size(), 2u);
    for (const auto& prog : per) EXPECT_EQ(prog.decrease_constraints, t * 2);
  }
  // Neither example can be answered -1, so half of the constraints are vacuous.
  EXPECT_EQ(assemble_monolithic(p, Rational(1, 2), 2, 2).vacuous_constraints, 4u);
}

TEST(Assemble, SingleExampleDecompositionDegenerates) {
  Rng rng(1);
  auto spec = testing::random_pomdp_spec(rng);
  spec.examples.resize(1);
  const auto p = make_pomdp(spec);
  const auto mono = assemble_monolithic(p, Rational(1, 2), 2, 2);
  const auto per = assemble_per_example(p, Rational(1, 2), 2, 2);
  ASSERT_EQ(per.size(), 1u);
  const auto a = per[0].to_lp(), m = mono.to_lp();
  EXPECT_EQ(a.num_rows(), m.num_rows());
  EXPECT_EQ(a.num_columns(), m.num_columns());
  EXPECT_EQ(a.nonzeros(), m.nonzeros());
  EXPECT_EQ(per[0].decrease_constraints, mono.decrease_constraints);
}

TEST(Assemble, PolicyStructure) {
  const auto p = toy_pomdp();
  const auto one = assemble_policy(p, PartitionPolicy::constant(2, 0), Rational(9, 10), 1, 2);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].decrease_constraints, 2u);

  ProgramOptions independent;
  independent.coupling = PolicyCoupling::Independent;
  PartitionPolicy two;
  const Poly diff = Poly::variable(2, 1) - Poly::variable(2, 0);
  two.regions = {{{diff}, 0}, {{-diff}, 1}};
  const auto split = assemble_policy(p, two, Rational(9, 10), 1, 2, independent);
  ASSERT_EQ(split.size(), 2u);
  for (const auto& prog : split) {
    std::size_t multipliers = 0;
    for (const auto& v : prog.vars.all()) multipliers += v.kind == VarKind::Multiplier;
    EXPECT_GT(multipliers, 0u) << prog.name;
  }
}

TEST(Assemble, EmptyFailureSetIsFlagged) {
  EXPECT_TRUE(assemble_monolithic(toy_pomdp(), Rational(0), 1, 2).failure_set_empty);
  EXPECT_TRUE(assemble_monolithic(testing::single_hypothesis_pomdp(), Rational(1), 1, 2).failure_set_empty);
  EXPECT_FALSE(assemble_monolithic(toy_pomdp(), Rational(1, 2), 1, 2).failure_set_empty);
}

TEST(PolicyModes, RegionsSharingAnExampleMerge) {
  PartitionPolicy policy;
  const Poly x = Poly::variable(3, 0), y = Poly::variable(3, 1), z = Poly::variable(3, 2);
  policy.regions = {{{x - y, x - z}, 0}, {{y - x, x - z}, 0}, {{z - x}, 1}};
  const auto modes = policy_modes(policy);
  ASSERT_EQ(modes.size(), 2u);
  EXPECT_EQ(modes[0].example, 0u);
  EXPECT_EQ(modes[0].region, std::vector<Poly>{x - z});
  EXPECT_EQ(modes[1].region, std::vector<Poly>{z - x});
}

TEST(SplitComponents, IndependentConstraintsSeparate) {
  DsosProgram prog;
  prog.constraints.push_back(dsos_encode(PolyTemplate(b(0) * b(0)), prog.vars, "a"));
  prog.constraints.push_back(dsos_encode(PolyTemplate(b(1) * b(1)), prog.vars, "b"));
  EXPECT_EQ(split_components(prog).size(), 2u);
}

// Any feasible Gram assignment reproduces the target exactly and is PSD by
// dominance; sampled values of the target on the simplex are nonnegative.
TEST(DsosProperties, FeasibleEncodingsAreExactAndNonnegative) {
  Rng rng(17);
  int feasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + testing::uniform_index(rng, 2);
    // m^T Q m with Q diagonally dominant by construction, plus a small
    // perturbation that sometimes breaks dominance.
    const auto basis = monomials_up_to(n, n, 1);
    const std::size_t k = basis.size();
    std::vector<RationalVector> Q(k, RationalVector(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) Q[i][j] = Q[j][i] = testing::random_rational(rng, 3, 4);
    for (std::size_t i = 0; i < k; ++i) {
      Q[i][i] = testing::random_rational(rng, 2, 3, true);
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) Q[i][i] += abs(Q[i][j]);
    }
    Poly target(n);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) target += Poly::monomial(basis[i] * basis[j], Q[i][j]);
    if (testing::uniform_index(rng, 3) == 0) target += testing::random_poly(rng, n, n, 2, 1);
    if (target.degree() != 2) continue;
    DsosProgram prog;
    prog.constraints.push_back(dsos_encode(PolyTemplate(target), prog.vars, "c"));
    const auto r = lp::solve_audited(prog.to_lp());
    ASSERT_TRUE(r.audited);
    if (r.status != lp::Status::Feasible) continue;
    ++feasible;
    const auto gram = recover_gram(prog.constraints[0], r.audit.assignment);
    EXPECT_TRUE(diagonally_dominant(gram));
    EXPECT_EQ(gram_polynomial(prog.constraints[0], gram), target);
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> pt(n);
      for (auto& v : pt) v = std::uniform_real_distribution<double>(-3, 3)(rng);
      EXPECT_GE(target.eval(pt), -1e-9);
    }
  }
  EXPECT_GT(feasible, 10);
}

}  // namespace
}  // namespace teachcert
