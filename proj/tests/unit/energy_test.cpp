#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "iskew/asymptotics.hpp"
#include "iskew/energy.hpp"
#include "reference_models.hpp"

using namespace iskew;
using namespace iskew::reference;

namespace {

std::vector<double> flat(const EnergyResult& r) {
  std::vector<double> v;
  for (const auto& p : r.paths) v.insert(v.end(), p.velocity().begin(), p.velocity().end());
  return v;
}

}  // namespace

TEST(PhiComponent, ConvergesToContinuousFunctional) {
  // scipy quadrature of int_0^1 sigma exp(eta hat h_t) dt for unit velocity
  const auto c = component(1.0, 0.2, -1.0, 0.1);
  EXPECT_NEAR(phi_component(c, VelocityPath::constant(PathGrid(64), 1.0)), 0.1278234998713616, 1e-3);
  EXPECT_NEAR(phi_component(c, VelocityPath::constant(PathGrid(1024), 1.0)), 0.1278234998713616, 2e-4);
}

TEST(PhiComponent, ConstantVolIsSigmaTimesTerminal) {
  const auto c = component(1.0, 0.3, 0.0, 0.5);
  const VelocityPath p(PathGrid(4), {1.0, -1.0, 2.0, 0.5});
  EXPECT_NEAR(phi_component(c, p), 0.3 * p.terminal(), 1e-15);
}

TEST(PhiIndex, LogSumExpOfComponents) {
  const auto m = two_asset();
  const PathGrid g(16);
  const std::vector<VelocityPath> paths{VelocityPath::constant(g, 0.3), VelocityPath::constant(g, -0.2)};
  const double a = phi_component(m.components[0], paths[0]);
  const double b = phi_component(m.components[1], paths[1]);
  EXPECT_NEAR(phi_index(m, paths), std::log(0.5 * std::exp(a) + 0.5 * std::exp(b)), 1e-15);
  EXPECT_EQ(phi_index(m, std::vector<VelocityPath>{VelocityPath::zero(g), VelocityPath::zero(g)}), 0.0);
}

TEST(PhiIndex, TwoFactorUsesPairedVolDriver) {
  const auto m = two_factor_single(0.2, 1.0, 0.1, -0.5);
  const PathGrid g(16);
  const std::vector<VelocityPath> paths{VelocityPath::constant(g, 0.4), VelocityPath::constant(g, -0.7)};
  EXPECT_NEAR(phi_index(m, paths), phi_component(m.components[0], paths[0], paths[1]), 1e-15);
}

TEST(IndexFunctional, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01;
  for (const auto& m : {rough_reference(), three_asset(), two_factor_three_asset()}) {
    const IndexFunctional f(m, PathGrid(12));
    std::vector<double> v(f.dimension()), g(f.dimension()), e(f.dimension());
    for (auto& x : v) x = 0.5 * n01(rng);
    const double value = f.value_and_gradient(v, g);
    EXPECT_NEAR(value, f.value(v), 1e-14);
    for (std::size_t i = 0; i < v.size(); ++i) {
      e = v;
      e[i] += 1e-6;
      const double up = f.value(e);
      e[i] -= 2e-6;
      const double down = f.value(e);
      EXPECT_NEAR(g[i], (up - down) / 2e-6, 1e-8);
    }
  }
}

TEST(EnergyObjective, WhitenedQuadraticForm) {
  const auto m = two_asset();
  const PathGrid g(2);
  const std::vector<VelocityPath> paths{VelocityPath(g, {1.0, 0.0}), VelocityPath(g, {1.0, 2.0})};
  // cell 0: (1,1) -> 4/3; cell 1: (0,2) -> 4 * 4/3 = 16/3; total 20/3, times 1/(2m)
  EXPECT_NEAR(energy_objective(m, paths), 20.0 / 3.0 / 4.0, 1e-14);
}

TEST(SolveEnergy, ZeroAtZero) {
  const auto r = solve_energy(rough_reference(), 0.0, PathGrid(32));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.lambda_value, 0.0);
  EXPECT_EQ(r.multiplier, 0.0);
}

TEST(SolveEnergy, BlackScholesIsQuadratic) {
  const auto m = single(0.2, 0.0, 0.5);
  for (double x : {-0.3, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.3}) {
    const auto r = solve_energy(m, x, PathGrid(32));
    ASSERT_TRUE(r.converged) << x;
    const double exact = x * x / (2 * 0.04);
    EXPECT_NEAR(r.lambda_value / exact, 1.0, 1e-6) << x;
    EXPECT_NEAR(r.multiplier, x / 0.04, 1e-6) << x;
  }
}

TEST(SolveEnergy, MatchesBruteForceOracleOnCoarseGrid) {
  // tests/oracles/energy_oracle.py: random admissible directions then SLSQP, m = 8
  const PathGrid g(8);
  EXPECT_NEAR(solve_energy(rough_reference(), 0.05, g).lambda_value, 0.04051038228561084, 1e-9);
  EXPECT_NEAR(solve_energy(rough_reference(), -0.05, g).lambda_value, 0.02533258734132107, 1e-9);
  EXPECT_NEAR(solve_energy(two_asset(), 0.05, g).lambda_value, 0.030202983702450913, 1e-9);
}

TEST(SolveEnergy, SatisfiesConstraintAndFirstOrderCondition) {
  for (const auto& m : {rough_reference(), three_asset(), two_factor_three_asset()}) {
    const PathGrid g(64);
    for (double x : {-0.2, 0.07}) {
      const auto r = solve_energy(m, x, g);
      ASSERT_TRUE(r.converged) << x;
      EXPECT_LE(r.constraint_residual, 1e-8);
      EXPECT_LE(r.stationarity_residual, 1e-6);
      EXPECT_NEAR(phi_index(m, r.paths), x, 1e-8);
      EXPECT_NEAR(energy_objective(m, r.paths), r.lambda_value, 1e-10);
      EXPECT_GE(r.starts_converged, 1u);
    }
  }
}

TEST(SolveEnergy, MultiplierIsDerivativeOfRate) {
  const auto m = three_asset();
  const PathGrid g(64);
  for (double x : {-0.1, 0.1}) {
    const double h = 0.01;
    const double slope = (solve_energy(m, x + h, g).lambda_value - solve_energy(m, x - h, g).lambda_value) / (2 * h);
    const double mult = solve_energy(m, x, g).multiplier;
    EXPECT_NEAR(mult / slope, 1.0, 0.05) << x;
  }
}

TEST(SolveEnergy, MonotoneOnEachSide) {
  const auto m = rough_reference();
  const PathGrid g(64);
  double previous = 0.0;
  for (double x : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    const double v = solve_energy(m, x, g).lambda_value;
    EXPECT_GE(v, previous - 1e-6);
    previous = v;
  }
  previous = 0.0;
  for (double x : {-0.05, -0.1, -0.2, -0.3, -0.5}) {
    const double v = solve_energy(m, x, g).lambda_value;
    EXPECT_GE(v, previous - 1e-6);
    previous = v;
  }
}

TEST(SolveEnergy, GridRefinementIsStable) {
  const auto m = rough_reference();
  const double coarse = solve_energy(m, 0.1, PathGrid(128)).lambda_value;
  const double fine = solve_energy(m, 0.1, PathGrid(256)).lambda_value;
  EXPECT_LT(std::abs(fine - coarse) / fine, 0.005);
}

TEST(SolveEnergy, WarnsBeyondAsymptoticRange) {
  const auto r = solve_energy(single(0.2, 0.0, 0.5), 1.5, PathGrid(16));
  EXPECT_FALSE(r.warning.empty());
  EXPECT_TRUE(solve_energy(single(0.2, 0.0, 0.5), 0.5, PathGrid(16)).warning.empty());
}

TEST(SolveEnergy, MinimizerCellsAreRhoWeightedGradient) {
  // For one asset the optimal velocity is proportional to the functional gradient.
  const auto m = rough_reference();
  const PathGrid g(32);
  const auto r = solve_energy(m, 0.1, g);
  const auto v = flat(r);
  std::vector<double> grad(v.size());
  IndexFunctional(m, g).value_and_gradient(v, grad);
  for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(v[k], r.multiplier * grad[k] * 32.0, 1e-6);
}

TEST(ExpansionCoefficients, RoughReference) {
  const auto ec = expansion_coefficients(rough_reference());
  EXPECT_NEAR(ec.sigma0_sq, 0.04, 1e-15);
  EXPECT_NEAR(ec.second, 25.0, 1e-12);
  EXPECT_NEAR(ec.third, -3.0 * (-0.18633899971 * 0.04) / std::pow(0.04, 3), 1e-5);
  EXPECT_NEAR(ec.third, 349.4, 0.05);
}

TEST(ExpansionCoefficients, ConstantVolHasNoCubicTerm) {
  const auto ec = expansion_coefficients(single(0.3, 0.0, 0.5));
  EXPECT_EQ(ec.third, 0.0);
  EXPECT_NEAR(ec.second * ec.sigma0_sq, 1.0, 1e-15);
}

TEST(SmileFromEnergy, ConstantVolIsFlat) {
  const std::vector<double> xs{-0.2, -0.1, 0.0, 0.1, 0.2};
  const auto rows = smile_from_energy(single(0.2, 0.0, 0.5), xs, PathGrid(16));
  ASSERT_EQ(rows.size(), xs.size());
  for (const auto& r : rows) {
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.implied_variance, 0.04, 1e-8) << r.x;
  }
  EXPECT_EQ(rows[2].lambda, 0.0);
}

TEST(SmileFromEnergy, IndependentOfWorkerCount) {
  const std::vector<double> xs{-0.1, -0.05, 0.0, 0.05, 0.1};
  const auto a = smile_from_energy(three_asset(), xs, PathGrid(32), {}, 1);
  const auto b = smile_from_energy(three_asset(), xs, PathGrid(32), {}, 4);
  std::ostringstream sa, sb;
  write_energy_csv(sa, a);
  write_energy_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(SmileFromEnergy, CsvHeader) {
  std::ostringstream out;
  write_energy_csv(out, std::vector<EnergyRow>{});
  EXPECT_EQ(out.str(), "x,lambda,multiplier,implied_variance,converged,multistart_spread\n");
}
