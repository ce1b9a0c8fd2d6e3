#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "iskew/implied_vol.hpp"

using namespace iskew;

TEST(BlackScholes, RoundTripAtTheMoney) {
  const double p = bs_price(0.1, 0.0, OptionSide::Call);
  EXPECT_NEAR(p, 0.039878, 1e-6);
  const auto iv = implied_vol_bs(p, 0.0, OptionSide::Call);
  ASSERT_TRUE(iv.ok());
  EXPECT_NEAR(iv.value, 0.1, 1e-9);
  const auto rounded = implied_vol_bs(0.039878, 0.0, OptionSide::Call);
  EXPECT_NEAR(bs_price(rounded.value, 0.0, OptionSide::Call), 0.039878, 1e-6);
}

TEST(BlackScholes, RoundTripAcrossStrikesAndVols) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> vol(0.01, 2.0), x(-0.5, 0.5);
  for (int t = 0; t < 200; ++t) {
    const double v = vol(rng), k = x(rng);
    const auto side = resolve_side(OptionSide::Auto, k);
    const auto iv = implied_vol_bs(bs_price(v, k, side), k, side);
    ASSERT_TRUE(iv.ok()) << v << ' ' << k;
    EXPECT_NEAR(bs_price(iv.value, k, side), bs_price(v, k, side), 1e-12);
  }
}

TEST(BlackScholes, PutCallParity) {
  for (double k : {-0.2, 0.0, 0.3}) {
    EXPECT_NEAR(bs_price(0.25, k, OptionSide::Call) - bs_price(0.25, k, OptionSide::Put), 1.0 - std::exp(k), 1e-14);
  }
}

TEST(BlackScholes, BandEdges) {
  const auto low = implied_vol_bs(0.0, 0.1, OptionSide::Call);
  EXPECT_EQ(low.status, ImpliedVolStatus::BelowLowerBound);
  EXPECT_EQ(low.value, 0.0);
  const auto high = implied_vol_bs(1.0, 0.1, OptionSide::Call);
  EXPECT_EQ(high.status, ImpliedVolStatus::AboveUpperBound);
  const auto tiny = implied_vol_bs(bs_price(1e-3, 0.0, OptionSide::Call), 0.0, OptionSide::Call);
  ASSERT_TRUE(tiny.ok());
  EXPECT_NEAR(tiny.value, 1e-3, 1e-9);
}

TEST(Bachelier, RoundTrip) {
  const auto iv = implied_vol_bachelier(bachelier_price(0.1, 0.0, OptionSide::Call), 0.0, OptionSide::Call);
  ASSERT_TRUE(iv.ok());
  EXPECT_NEAR(iv.value, 0.1, 1e-9);
  for (double k : {-0.15, 0.07}) {
    const auto side = resolve_side(OptionSide::Auto, k);
    EXPECT_NEAR(implied_vol_bachelier(bachelier_price(0.2, k, side), k, side).value, 0.2, 1e-9);
  }
}

TEST(Bachelier, AgreesWithBlackScholesForSmallVol) {
  const double bs = bs_price(0.02, 0.0, OptionSide::Call);
  const auto normal = implied_vol_bachelier(bs, 0.0, OptionSide::Call);
  ASSERT_TRUE(normal.ok());
  EXPECT_LT(std::abs(normal.value - 0.02), 1e-3);
}

TEST(Bachelier, VolFromDigital) {
  const double x = 0.3, vol = 0.12;
  const double p = 0.5 * std::erfc(x / vol / std::sqrt(2.0));  // Phi(-x / vol)
  EXPECT_NEAR(bachelier_vol_from_digital(p, x), vol, 1e-12);
  EXPECT_THROW(bachelier_vol_from_digital(0.0, x), std::invalid_argument);
  EXPECT_THROW(bachelier_vol_from_digital(0.7, x), std::invalid_argument);
}

TEST(ResolveSide, OutOfTheMoney) {
  EXPECT_EQ(resolve_side(OptionSide::Auto, 0.0), OptionSide::Call);
  EXPECT_EQ(resolve_side(OptionSide::Auto, 0.1), OptionSide::Call);
  EXPECT_EQ(resolve_side(OptionSide::Auto, -0.1), OptionSide::Put);
  EXPECT_EQ(resolve_side(OptionSide::Put, 0.1), OptionSide::Put);
}
