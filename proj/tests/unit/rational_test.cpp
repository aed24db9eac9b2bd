#include <gtest/gtest.h>

#include "teachcert/errors.hpp"
#include "teachcert/rational.hpp"

namespace teachcert {
namespace {

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("-1.5e-3"), Rational(-3, 2000));
  EXPECT_EQ(parse_rational("0.09"), Rational(9, 100));
  EXPECT_EQ(parse_rational("1e2"), Rational(100));
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "abc", "1/0", "1.2.3", "--1", "1/"}) EXPECT_THROW(parse_rational(bad), SchemaError) << bad;
}

TEST(Rational, CanonicalText) {
  EXPECT_EQ(to_string(Rational(2, 4)), "1/2");
  EXPECT_EQ(to_string(Rational(6, 3)), "2");
  EXPECT_EQ(to_string(Rational(-1, 3)), "-1/3");
}

TEST(Rational, ExactFromDoubleIsDyadic) {
  EXPECT_EQ(exact_from_double(0.5), Rational(1, 2));
  const Rational tenth = exact_from_double(0.1);
  EXPECT_NE(tenth, Rational(1, 10));
  EXPECT_DOUBLE_EQ(to_double(tenth), 0.1);
}

TEST(Rational, RationalizeRecoversSmallFractions) {
  EXPECT_EQ(rationalize(1.0 / 3.0), Rational(1, 3));
  EXPECT_EQ(rationalize(-0.8), Rational(-4, 5));
  EXPECT_EQ(rationalize(0.0), Rational(0));
  const Rational approx = rationalize(3.14159265358979, 1000);
  EXPECT_LE(approx.get_den(), 1000);
  EXPECT_NEAR(to_double(approx), 3.14159265358979, 1e-5);
}

}  // namespace
}  // namespace teachcert
