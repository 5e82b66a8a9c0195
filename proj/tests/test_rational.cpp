#include <gtest/gtest.h>

#include <cstdint>
#include <limits>

#include "qrobust/rational.hpp"
#include "qrobust/rng.hpp"

using qrobust::Rational;
using qrobust::Value;

TEST(Rational, StoredInLowestTermsWithPositiveDenominator) {
  const Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(r.str(), "-3/2");
  EXPECT_EQ(Rational(0, -7).den(), 1);
  EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, Parse) {
  EXPECT_EQ(Rational::parse("3/4"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("-0.25"), Rational(-1, 4));
  EXPECT_EQ(Rational::parse("1.5"), Rational(3, 2));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_EQ(Rational::parse("6/8"), Rational(3, 4));
  EXPECT_THROW(Rational::parse("1/0"), std::exception);
  EXPECT_THROW(Rational::parse("abc"), std::exception);
  EXPECT_THROW(Rational::parse(""), std::exception);
}

TEST(Rational, FloorCeil) {
  EXPECT_EQ(Rational(7, 2).floor(), 3);
  EXPECT_EQ(Rational(7, 2).ceil(), 4);
  EXPECT_EQ(Rational(-7, 2).floor(), -4);
  EXPECT_EQ(Rational(-7, 2).ceil(), -3);
  EXPECT_EQ(Rational(5).floor(), 5);
}

TEST(Rational, OrderingIsExact) {
  EXPECT_LT(Rational(1, 3), Rational(334, 1000));
  EXPECT_GT(Rational(-1, 3), Rational(-334, 1000));
  EXPECT_EQ(Rational(2, 6), Rational(1, 3));
}

TEST(Rational, OverflowIsReported) {
  const Rational big(std::numeric_limits<std::int64_t>::max());
  EXPECT_THROW(big * big, std::overflow_error);
  EXPECT_THROW(big + Rational(1), std::overflow_error);
}

TEST(Rational, AddThenSubtractRoundTrips) {
  qrobust::SplitMix64 rng(42);
  for (int i = 0; i < 20000; ++i) {
    const Rational a(rng.draw(-1000000, 1000000), rng.draw(1, 1000000));
    const Rational b(rng.draw(-1000000, 1000000), rng.draw(1, 1000000));
    ASSERT_EQ((a + b) - b, a);
    if (!b.is_zero()) ASSERT_EQ((a * b) / b, a);
  }
}

TEST(Value, InfinityOrdersAboveEveryRational) {
  const Value inf = Value::infinity();
  EXPECT_GT(inf, Value(Rational(1000000000)));
  EXPECT_EQ(inf, Value::infinity());
  EXPECT_LT(Value(Rational(-5)), Value(Rational(3)));
  EXPECT_EQ(inf.str(), "inf");
  EXPECT_THROW((void)inf.rational(), std::logic_error);
}

TEST(SplitMix64, KnownStream) {
  // First outputs for seed 0 of the reference generator.
  qrobust::SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.next(), 0x06C45D188009454FULL);
}
