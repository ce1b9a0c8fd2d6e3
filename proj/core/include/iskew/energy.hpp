#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "iskew/kernel.hpp"
#include "iskew/model.hpp"

namespace iskew {

/// Discretized index functional
///
///   phi(h) = log sum_i w_i exp(phi_i),   phi_i = sum_k f_i(hat h_vol(mid_k)) v_price[k] / m,
///
/// with hat h evaluated at cell midpoints by averaging adjacent lifted node values.
/// Velocities are laid out driver-major: v[d * m + k] is the velocity of driver d on cell k.
class IndexFunctional {
 public:
  IndexFunctional(const IndexModel& model, PathGrid grid);

  const IndexModel& model() const noexcept { return model_; }
  const PathGrid& grid() const noexcept { return grid_; }
  std::size_t drivers() const noexcept { return model_.drivers(); }
  std::size_t dimension() const noexcept { return drivers() * grid_.steps(); }

  double value(std::span<const double> v) const;
  /// Value and d phi / d v.
  double value_and_gradient(std::span<const double> v, std::span<double> grad) const;
  /// phi_i for every component.
  std::vector<double> component_values(std::span<const double> v) const;

 private:
  IndexModel model_;
  PathGrid grid_;
  std::vector<KernelWeights> weights_;
};

/// phi_i(h) = int_0^1 f(hat h) dh for one-factor components.
double phi_component(const Component& c, const VelocityPath& p);
/// phi_i(h^1, h^2) = int_0^1 f(hat h^2) dh^1 for two-factor components.
double phi_component(const Component& c, const VelocityPath& price, const VelocityPath& vol);

/// phi over N (one-factor) or 2N (two-factor, price drivers first) paths.
double phi_index(const IndexModel& model, std::span<const VelocityPath> paths);

/// (1 / (2m)) sum_k v_k^T rho^{-1} v_k
double energy_objective(const IndexModel& model, std::span<const VelocityPath> paths);

struct SolverOptions {
  double constraint_tolerance = 1e-8;
  double gradient_tolerance = 1e-6;  // first-order residual, Cameron-Martin norm
  std::size_t max_outer_iterations = 200;
  std::size_t max_inner_iterations = 3000;
  std::size_t extra_starts = 2;
  double perturbation_scale = 0.5;   // random start offset relative to the first-order start
  std::uint64_t seed = 20240901;
  double max_abs_x = 1.0;
};

struct EnergyResult {
  double x = 0.0;
  double lambda_value = 0.0;  // Lambda(x)
  double multiplier = 0.0;    // Lagrange multiplier, equals Lambda'(x) at the optimum
  std::vector<VelocityPath> paths;
  double constraint_residual = 0.0;
  double stationarity_residual = 0.0;  // |rho^{-1} hdot - multiplier D phi| in Cameron-Martin norm
  double multistart_spread = 0.0;
  std::size_t starts_converged = 0;
  bool converged = false;
  std::string warning;
};

/// Lambda(x) = inf { (1/2) <h, rho^{-1} h> : phi(h) = x } on the given grid.
EnergyResult solve_energy(const IndexModel& model, double x, const PathGrid& grid,
                          const SolverOptions& options = {});

/// Third-order expansion of Lambda at zero:
///   Lambda(x) = (x^2 / 2 - x^3 skew_term / (2 sigma0^4)) / sigma0^2 + o(x^3).
struct ExpansionCoefficients {
  double sigma0_sq = 0.0;
  double second = 0.0;     // Lambda''(0) = 1 / sigma0^2
  double third = 0.0;      // Lambda'''(0) = -3 skew_term / sigma0^6
  double skew_term = 0.0;  // phi_0''(rho phi_0', rho phi_0')
};

ExpansionCoefficients expansion_coefficients(const IndexModel& model);

struct EnergyRow {
  double x = 0.0;
  double lambda = 0.0;
  double multiplier = 0.0;
  double implied_variance = 0.0;  // x^2 / (2 Lambda(x)); sigma0^2 at x = 0
  bool converged = false;
  double multistart_spread = 0.0;
};

/// One solve per x; rows keep the order of xs and are flagged, never dropped.
std::vector<EnergyRow> smile_from_energy(const IndexModel& model, std::span<const double> xs,
                                         const PathGrid& grid, const SolverOptions& options = {},
                                         unsigned threads = 0);

/// Header x,lambda,multiplier,implied_variance,converged,multistart_spread.
void write_energy_csv(std::ostream& out, std::span<const EnergyRow> rows);

}  // namespace iskew
