#include <gtest/gtest.h>

#include "generators.hpp"
#include "teachcert/errors.hpp"
#include "teachcert/oracle.hpp"
#include "teachcert/report.hpp"
#include "teachcert/verify.hpp"

namespace teachcert {
namespace {

using testing::Rng;
using testing::toy_pomdp;

const Rational kLow(2, 5), kHigh(9, 10);

TEST(Verify, ToyArbitraryBelowWorstLeaf) {
  const auto v = verify_arbitrary(toy_pomdp(), kLow, 1, 2);
  ASSERT_TRUE(v.verified()) << v.note;
  ASSERT_TRUE(v.certificate.has_value());
  EXPECT_EQ(v.certificate->kind, CertificateKind::Monolithic);
  EXPECT_EQ(v.degree, 2u);
  EXPECT_TRUE(try_audit_certificate(*v.certificate, toy_pomdp()).passed);
}

TEST(Verify, ToyArbitraryAboveWorstLeafIsUnknown) {
  const auto p = toy_pomdp();
  for (const auto& v : {verify_arbitrary(p, kHigh, 1, 2), verify_per_example(p, kHigh, 1, 2)}) {
    EXPECT_EQ(v.outcome, Outcome::Unknown);
    EXPECT_FALSE(v.certificate.has_value());
  }
}

TEST(Verify, ToyPerExampleComposes) {
  const auto p = toy_pomdp();
  const auto v = verify_per_example(p, kLow, 1, 2);
  ASSERT_TRUE(v.verified()) << v.note;
  EXPECT_EQ(v.certificate->kind, CertificateKind::PerExample);
  EXPECT_EQ(v.certificate->barriers.size(), v.certificate->labels.size());
}

TEST(Verify, ToyAlwaysSeparatingPolicy) {
  const auto p = toy_pomdp();
  const auto v = verify_policy(p, PartitionPolicy::constant(2, 0), kHigh, 1, 2);
  ASSERT_TRUE(v.verified()) << v.note;
  EXPECT_EQ(v.certificate->kind, CertificateKind::PerPartition);
  EXPECT_EQ(verify_policy(p, PartitionPolicy::constant(2, 1), Rational(3, 5), 3, 2).outcome, Outcome::Unknown);
}

TEST(Verify, IndependentRegionsCompose) {
  const auto p = toy_pomdp();
  VerifyOptions opt;
  opt.program.coupling = PolicyCoupling::Independent;
  const auto policy = policy_to_partition(p, AdaptivePolicy::custom({0, 0}));
  EXPECT_TRUE(verify_policy(p, policy, kHigh, 1, 2, opt).verified());
}

TEST(Verify, ZeroPerformanceIsTrivial) {
  const auto p = toy_pomdp();
  for (unsigned t = 1; t <= 4; ++t) {
    const auto v = verify_arbitrary(p, Rational(0), t, 2);
    ASSERT_TRUE(v.verified()) << "t*=" << t << " " << v.note;
    EXPECT_LE(v.certificate->barrier().degree(), 0);
  }
}

TEST(Verify, SingleHypothesisAtFullPerformance) {
  EXPECT_TRUE(verify_arbitrary(testing::single_hypothesis_pomdp(), Rational(1), 1, 2).verified());
}

TEST(Verify, InvalidArguments) {
  const auto p = toy_pomdp();
  EXPECT_THROW(verify_arbitrary(p, Rational(3, 2), 1, 2), InvalidPerformance);
  EXPECT_THROW(verify_arbitrary(p, kLow, 1, 1), OddDegree);
  EXPECT_THROW(verify(p, VerifyMode::Policy, nullptr, kLow, 1, 2), InvariantViolation);
}

TEST(Verify, EscalationRecordsDegree) {
  VerifyOptions opt;
  opt.escalate = true;
  const auto v = verify(toy_pomdp(), VerifyMode::Arbitrary, nullptr, kHigh, 1, 2, opt);
  EXPECT_EQ(v.outcome, Outcome::Unknown);
  EXPECT_EQ(v.degree, 4u);
}

TEST(Verify, RowBudgetSkipsProgram) {
  VerifyOptions opt;
  opt.row_budget = 5;
  const auto v = verify_arbitrary(toy_pomdp(), kLow, 1, 2, opt);
  EXPECT_EQ(v.outcome, Outcome::Unknown);
  ASSERT_FALSE(v.diagnostics.empty());
  EXPECT_EQ(v.diagnostics.front().status, "skipped");
}

TEST(Verify, PaperFaithfulModeRuns) {
  VerifyOptions opt;
  opt.program.paper_faithful = true;
  const auto v = verify_arbitrary(toy_pomdp(), Rational(0), 1, 2, opt);
  EXPECT_TRUE(v.verified()) << v.note;
}

TEST(Verify, ExactSolverPath) {
  VerifyOptions opt;
  opt.exact_lp = true;
  EXPECT_TRUE(verify_arbitrary(toy_pomdp(), kLow, 1, 2, opt).verified());
}

TEST(MinTrials, ToyAlwaysSeparating) {
  const auto policy = PartitionPolicy::constant(2, 0);
  const auto r = min_trials(toy_pomdp(), kHigh, 2, 4, VerifyMode::Policy, &policy);
  ASSERT_TRUE(r.t_star.has_value());
  EXPECT_EQ(*r.t_star, 1u);
  // Descending search stops at t* = 1.
  ASSERT_EQ(r.attempts.size(), 4u);
  EXPECT_EQ(r.attempts.front().first, 4u);
  for (const auto& [t, v] : r.attempts) EXPECT_TRUE(v.verified()) << t;
}

TEST(MinTrials, NothingVerifiedAtTop) {
  const auto r = min_trials(toy_pomdp(), kHigh, 2, 2, VerifyMode::Arbitrary);
  EXPECT_FALSE(r.t_star.has_value());
  EXPECT_EQ(r.attempts.size(), 1u);
}

TEST(Audit, PerturbedCoefficientFails) {
  const auto p = toy_pomdp();
  auto v = verify_arbitrary(p, kLow, 1, 2);
  ASSERT_TRUE(v.verified());
  auto cert = *v.certificate;
  auto& B = cert.barriers[cert.composite];
  const auto [m, c] = *B.terms().begin();
  B.add_term(m, Rational(1, 100));
  EXPECT_THROW(audit_certificate(cert, p), AuditFailed);
}

TEST(Audit, ConstantNegativeBarrierOnZeroPerformance) {
  const auto p = toy_pomdp();
  auto v = verify_arbitrary(p, Rational(0), 2, 2);
  ASSERT_TRUE(v.verified());
  EXPECT_LT(barrier_value(v.certificate->barrier(), 0, p.p0()), 0);
  EXPECT_NO_THROW(audit_certificate(*v.certificate, p));
}

TEST(Report, VerdictReportCarriesDigestAndOutcome) {
  const auto p = toy_pomdp();
  const auto v = verify_arbitrary(p, kLow, 1, 2);
  ReportContext ctx;
  ctx.command = "verify";
  ctx.mode = "arbitrary";
  ctx.lambda = kLow;
  ctx.t_star = 1;
  ctx.degree = 2;
  const auto json = verdict_report(p, v, ctx);
  EXPECT_NE(json.find(pomdp_digest(p)), std::string::npos);
  EXPECT_NE(json.find("\"verified\""), std::string::npos);
  EXPECT_NE(json.find("wall_clock_seconds"), std::string::npos);
}

// Soundness and monotonicity over random instances (smaller than the
// acceptance sweep, which runs the full 200-instance version).
TEST(VerifyProperties, VerifiedImpliesOracle) {
  Rng rng(67);
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = testing::random_pomdp(rng);
    const unsigned t = 1 + static_cast<unsigned>(testing::uniform_index(rng, 3));
    const Rational lambda(static_cast<long>(2 + 2 * testing::uniform_index(rng, 3)), 10);
    const auto leaves = enumerate(p, t, OracleMode::Arbitrary);
    const bool holds = check_performance(leaves, p.target(), lambda).holds;
    for (const auto& v : {verify_arbitrary(p, lambda, t, 2), verify_per_example(p, lambda, t, 2)})
      if (v.verified()) {
        EXPECT_TRUE(holds) << scenario_json(p);
        EXPECT_TRUE(try_audit_certificate(*v.certificate, p).passed);
      }
  }
}

TEST(VerifyProperties, MonotoneInPerformance) {
  Rng rng(71);
  for (int trial = 0; trial < 15; ++trial) {
    const auto p = testing::random_pomdp(rng);
    const unsigned t = 1 + static_cast<unsigned>(testing::uniform_index(rng, 2));
    if (!verify_arbitrary(p, Rational(4, 5), t, 2).verified()) continue;
    for (const Rational lower : {Rational(3, 5), Rational(2, 5)})
      EXPECT_TRUE(verify_arbitrary(p, lower, t, 2).verified()) << scenario_json(p);
  }
}

}  // namespace
}  // namespace teachcert
