#include <gtest/gtest.h>

#include "generators.hpp"
#include "teachcert/errors.hpp"
#include "teachcert/lp.hpp"

namespace teachcert::lp {
namespace {

using testing::Rng;

Problem single(RowSense sense, const Rational& rhs, bool with_equality = true) {
  Problem p;
  const int x = p.add_column("x");
  if (with_equality) p.add_row("fix", {{x, 1}}, RowSense::Eq, 1);
  p.add_row("bound", {{x, 1}}, sense, rhs);
  return p;
}

TEST(Solve, TrivialFeasibleBothModes) {
  Problem p;
  const int x = p.add_column("x");
  p.add_row("fix", {{x, 1}}, RowSense::Eq, 1);
  for (Mode mode : {Mode::Float, Mode::Exact}) {
    const auto s = solve(p, mode);
    ASSERT_EQ(s.status, Status::Feasible);
    EXPECT_DOUBLE_EQ(s.values[0], 1.0);
  }
  EXPECT_EQ(solve(p, Mode::Exact).exact_values[0], 1);
}

TEST(Solve, TrivialInfeasibleWithFarkas) {
  Problem p;
  const int x = p.add_column("x");
  p.add_row("neg", {{x, 1}}, RowSense::Le, -1);
  for (Mode mode : {Mode::Float, Mode::Exact}) {
    const auto s = solve(p, mode);
    ASSERT_EQ(s.status, Status::Infeasible);
    const auto audit = recheck(p, s);
    EXPECT_EQ(audit.method, "farkas");
  }
  EXPECT_TRUE(validate_farkas(p, {Rational(-1)}));
  EXPECT_FALSE(validate_farkas(p, {Rational(1)}));
}

TEST(Solve, FreeColumnsAndObjective) {
  Problem p;
  const int x = p.add_column("x", false), y = p.add_column("y");
  p.add_row("sum", {{x, 1}, {y, 1}}, RowSense::Eq, -2);
  p.add_row("cap", {{y, 1}}, RowSense::Le, 3);
  p.set_objective({{y, 1}});
  for (Mode mode : {Mode::Float, Mode::Exact}) {
    const auto s = solve(p, mode);
    ASSERT_EQ(s.status, Status::Feasible);
    EXPECT_NEAR(s.values[0], -2.0, 1e-9);
    EXPECT_NEAR(s.values[1], 0.0, 1e-9);
  }
}

TEST(Solve, IterationLimit) {
  Problem p;
  const int x = p.add_column("x"), y = p.add_column("y");
  p.add_row("a", {{x, 1}, {y, 1}}, RowSense::Eq, 1);
  Options opt;
  opt.iteration_limit = 0;
  EXPECT_THROW(solve(p, Mode::Float, opt), IterationLimit);
}

TEST(Problem, ValidateRejectsUnknownColumns) {
  Problem p;
  p.add_column("x");
  p.add_row("bad", {{3, 1}}, RowSense::Eq, 0);
  EXPECT_THROW(p.validate(), InvariantViolation);
}

TEST(Problem, TextRoundTrip) {
  Problem p;
  const int x = p.add_column("x"), y = p.add_column("y", false);
  p.add_row("r1", {{x, Rational(1, 3)}, {y, -2}}, RowSense::Ge, Rational(-5, 7));
  p.add_row("r2", {{y, 1}}, RowSense::Le, 4);
  p.set_objective({{x, 1}});
  const auto back = Problem::from_text(p.to_text());
  EXPECT_EQ(back.to_text(), p.to_text());
  EXPECT_EQ(back.num_rows(), 2u);
  EXPECT_FALSE(back.columns()[1].nonneg);
}

TEST(Recheck, ExactSolutionPasses) {
  const auto p = single(RowSense::Le, 2);
  const auto s = solve(p, Mode::Exact);
  EXPECT_TRUE(recheck(p, s).passed);
}

TEST(Recheck, CorruptedFloatSolutionFails) {
  const auto p = single(RowSense::Le, 2);
  auto s = solve(p, Mode::Float);
  s.values[0] = 5.0;
  s.basis.clear();
  EXPECT_THROW(recheck(p, s), AuditFailed);
  EXPECT_FALSE(try_recheck(p, s).passed);
}

TEST(Recheck, SolutionJsonNamesStatus) {
  const auto p = single(RowSense::Le, 2);
  const auto json = solution_json(p, solve(p, Mode::Float));
  EXPECT_NE(json.find("\"feasible\""), std::string::npos);
}

// Random small LPs: float (after audit) and exact agree on status, and every
// feasible exact assignment satisfies each row exactly.
TEST(LpProperties, FloatAndExactAgree) {
  Rng rng(29);
  for (int trial = 0; trial < 150; ++trial) {
    Problem p;
    const std::size_t n = 2 + testing::uniform_index(rng, 4), m = 1 + testing::uniform_index(rng, 4);
    for (std::size_t j = 0; j < n; ++j) p.add_column("x" + std::to_string(j), testing::uniform_index(rng, 4) != 0);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::pair<int, Rational>> row;
      for (std::size_t j = 0; j < n; ++j)
        if (testing::uniform_index(rng, 3)) row.emplace_back(static_cast<int>(j), testing::random_rational(rng, 5, 3));
      const auto sense = static_cast<RowSense>(testing::uniform_index(rng, 3));
      p.add_row("r" + std::to_string(i), row, sense, testing::random_rational(rng, 5, 3));
    }
    const auto exact = solve(p, Mode::Exact);
    const auto audited = solve_audited(p);
    ASSERT_TRUE(audited.audited) << p.to_text();
    EXPECT_EQ(exact.status, audited.status) << p.to_text();
    EXPECT_TRUE(recheck(p, exact).passed);
    if (exact.status == Status::Infeasible) EXPECT_TRUE(validate_farkas(p, exact.exact_farkas));
  }
}

TEST(LpProperties, Deterministic) {
  Rng rng(31);
  Problem p;
  for (int j = 0; j < 6; ++j) p.add_column("x" + std::to_string(j));
  for (int i = 0; i < 4; ++i) {
    std::vector<std::pair<int, Rational>> row;
    for (int j = 0; j < 6; ++j) row.emplace_back(j, testing::random_rational(rng, 4, 3, true));
    p.add_row("r" + std::to_string(i), row, RowSense::Eq, Rational(1));
  }
  const auto a = solve(p, Mode::Float), b = solve(p, Mode::Float);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.values, b.values);
}

}  // namespace
}  // namespace teachcert::lp
