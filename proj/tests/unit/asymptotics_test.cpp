#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "iskew/asymptotics.hpp"
#include "iskew/kernel.hpp"
#include "reference_models.hpp"

using namespace iskew;
using namespace iskew::reference;

// Skew oracles: fourth-order finite differences of the continuous index functional along
// rho phi_0' (tests/oracles/asymptotics_oracle.py), independent of the closed forms.
// The difference scheme is accurate to about 1e-8.
constexpr double kOracleTol = 2e-8;

TEST(SpotVariance, ReferenceValues) {
  EXPECT_NEAR(index_spot_variance(rough_reference()), 0.04, 1e-15);
  EXPECT_NEAR(index_spot_variance(two_asset()), 0.0475, 1e-15);
  EXPECT_NEAR(index_spot_variance(three_asset()), 0.033625, 1e-15);
  EXPECT_NEAR(index_spot_variance(two_factor_three_asset()), 0.033625, 1e-15);
}

TEST(SingleAssetSkew, IsEtaTimesKappa) {
  const auto c = component(1.0, 0.2, -1.0, 0.1);
  EXPECT_NEAR(single_asset_skew(c), -0.465847495312, 1e-11);
}

TEST(IndexSkewOneFactor, MatchesFunctionalOracle) {
  EXPECT_NEAR(index_skew_one_factor(rough_reference()).variance_skew, -0.18633899971, kOracleTol);
  EXPECT_NEAR(index_skew_one_factor(two_asset()).variance_skew, -0.124727416664, kOracleTol);
  EXPECT_NEAR(index_skew_one_factor(three_asset()).variance_skew, -0.160077747213, kOracleTol);
}

TEST(IndexSkewOneFactor, SingleAssetReduction) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> sigma(0.05, 0.8), eta(-3.0, 3.0), hurst(0.01, 0.5);
  for (int t = 0; t < 100; ++t) {
    const auto m = single(sigma(rng), eta(rng), hurst(rng));
    const auto& c = m.components[0];
    const auto sa = index_skew_one_factor(m);
    EXPECT_NEAR(sa.variance_skew, 2.0 * c.vol.spot_slope() * kappa(c.hurst), 1e-13);
    EXPECT_NEAR(sa.vol_skew, single_asset_skew(c), 1e-13);
  }
}

TEST(IndexSkewOneFactor, ConstantVolEqualSigmaIsFlat) {
  auto m = two_asset();
  for (auto& c : m.components) {
    c.vol.sigma = 0.2;
    c.vol.eta = 0.0;
  }
  EXPECT_NEAR(index_skew_one_factor(m).variance_skew, 0.0, 1e-15);
}

TEST(IndexSkewOneFactor, ComonotoneConstantVolNearlyFlat) {
  auto m = three_asset();
  for (auto& c : m.components) {
    c.vol.eta = 0.0;
    c.vol.sigma = 0.2;
  }
  m.correlation = CorrelationMatrix::equicorrelated(3, 0.999);
  EXPECT_LT(std::abs(index_skew_one_factor(m).variance_skew), 1e-3);
}

TEST(IndexSkewOneFactor, ComonotoneConstantVolLimitIsSigmaDispersion) {
  // rho -> 1, eta = 0: S_I -> sum w sigma^2 - (sum w sigma)^2
  auto m = three_asset();
  for (auto& c : m.components) c.vol.eta = 0.0;
  m.correlation = CorrelationMatrix::equicorrelated(3, 0.999);
  double mean = 0.0, second = 0.0;
  for (const auto& c : m.components) {
    mean += c.weight * c.vol.sigma;
    second += c.weight * c.vol.sigma * c.vol.sigma;
  }
  EXPECT_NEAR(index_skew_one_factor(m).variance_skew, second - mean * mean, 1e-5);
}

TEST(IndexSkewOneFactor, ScaleEquivariance) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> scale(0.2, 5.0), xbar(-0.3, 0.3);
  for (int t = 0; t < 50; ++t) {
    const double lambda = scale(rng);
    const double x = xbar(rng);
    auto m = three_asset();
    auto scaled = m;
    for (auto& c : scaled.components) c.vol.sigma *= lambda;
    EXPECT_NEAR(index_spot_variance(scaled), lambda * lambda * index_spot_variance(m), 1e-14);
    const auto a = most_likely_configuration(m, x).xstar;
    const auto b = most_likely_configuration(scaled, x).xstar;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
  }
}

TEST(IndexSkewTwoFactor, MatchesFunctionalOracle) {
  EXPECT_NEAR(index_skew_two_factor(two_factor_single(0.2, 1.0, 0.1, -0.5)).variance_skew, -0.0931694993588, kOracleTol);
  EXPECT_NEAR(index_skew_two_factor(two_factor_single(0.2, 1.0, 0.1, -0.99)).variance_skew, -0.184475609717, kOracleTol);
  EXPECT_NEAR(index_skew_two_factor(two_factor_three_asset()).variance_skew, -0.111963889829, kOracleTol);
}

TEST(IndexSkewTwoFactor, ApproachesOneFactorAtPerfectAntiCorrelation) {
  const double one = index_skew_one_factor(rough_reference()).variance_skew;
  const double two = index_skew_two_factor(two_factor_single(0.2, 1.0, 0.1, -0.99)).variance_skew;
  EXPECT_LT(std::abs(two - one) / std::abs(one), 0.03);
}

TEST(IndexSkewTwoFactor, ConstantVolAgreesWithOneFactor) {
  auto two = two_factor_three_asset();
  for (auto& c : two.components) c.vol.eta = 0.0;
  auto one = three_asset();
  for (auto& c : one.components) c.vol.eta = 0.0;
  EXPECT_NEAR(index_skew(two).variance_skew, index_skew(one).variance_skew, 1e-15);
}

TEST(IndexSkew, DispatchesOnMode) {
  EXPECT_EQ(index_skew(three_asset()).variance_skew, index_skew_one_factor(three_asset()).variance_skew);
  const auto tf = two_factor_three_asset();
  EXPECT_EQ(index_skew(tf).variance_skew, index_skew_two_factor(tf).variance_skew);
  EXPECT_THROW(index_skew_one_factor(tf), std::invalid_argument);
}

TEST(IndexSkew, VolSkewIsHalfVarianceSkewOverSigma) {
  const auto sa = index_skew(three_asset());
  EXPECT_NEAR(sa.vol_skew, sa.variance_skew / (2.0 * std::sqrt(sa.spot_variance)), 1e-15);
}

TEST(ImpliedVarianceExpansion, FirstOrderInX) {
  const auto sa = index_skew(three_asset());
  EXPECT_EQ(implied_variance_expansion(sa, 0.0), sa.spot_variance);
  EXPECT_NEAR(implied_variance_expansion(sa, 0.05), sa.spot_variance + 0.05 * sa.variance_skew, 1e-15);
}

TEST(MostLikelyConfiguration, HandEvaluatedTwoAsset) {
  const auto ml = most_likely_configuration(two_asset(), 0.1);
  ASSERT_EQ(ml.xstar.size(), 2u);
  EXPECT_NEAR(ml.xstar[0], 0.0736842105263, 1e-12);
  EXPECT_NEAR(ml.xstar[1], 0.1263157894737, 1e-12);
}

TEST(MostLikelyConfiguration, ZeroAndSingleAsset) {
  for (double x : most_likely_configuration(three_asset(), 0.0).xstar) EXPECT_EQ(x, 0.0);
  EXPECT_NEAR(most_likely_configuration(rough_reference(), 0.37).xstar[0], 0.37, 1e-15);
}

TEST(MostLikelyConfiguration, LiteralFormulaHolds) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const auto m = three_asset();
  const double var = index_spot_variance(m);
  for (int t = 0; t < 20; ++t) {
    const double xbar = u(rng);
    const auto xs = most_likely_configuration(m, xbar).xstar;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double big_sigma = 0.0;
      for (std::size_t j = 0; j < m.size(); ++j) {
        big_sigma += m.correlation(i, j) * m.components[j].weight * m.components[j].vol.sigma;
      }
      EXPECT_NEAR(xs[i] * var, xbar * m.components[i].vol.sigma * big_sigma, 1e-15);
    }
  }
}

TEST(Asymptotics, RejectInvalidModels) {
  auto m = two_asset();
  m.components[0].weight = 0.9;
  EXPECT_THROW(index_skew(m), InvalidModel);
  EXPECT_THROW(most_likely_configuration(m, 0.1), InvalidModel);
}
