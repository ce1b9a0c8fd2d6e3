#pragma once

#include <vector>

#include "iskew/model.hpp"

namespace iskew {

/// Small-noise implied variance at unit maturity, sigma^2(x) ~ spot_variance + x * variance_skew.
struct SmileAsymptotics {
  double spot_variance = 0.0;
  double variance_skew = 0.0;  // slope of implied variance in log-moneyness
  double vol_skew = 0.0;       // variance_skew / (2 sqrt(spot_variance))
};

/// First-order component log-moves behind an index log-move xbar.
struct MostLikelyConfiguration {
  double xbar = 0.0;
  std::vector<double> xstar;
};

/// sigma_I^2 = sum_ij w_i w_j rho_ij sigma_i sigma_j over the price-driver block.
double index_spot_variance(const IndexModel& model);

/// ATM implied-vol skew of a single rough Bergomi asset: (f'(0) / f(0)) <K^H 1, 1>.
double single_asset_skew(const Component& c);

SmileAsymptotics index_skew_one_factor(const IndexModel& model);

/// Two-factor skew with Phi_i = [[0, f_i'(0) kappa], [f_i'(0) kappa, 0]].
SmileAsymptotics index_skew_two_factor(const IndexModel& model);

/// Dispatches on model.mode.
SmileAsymptotics index_skew(const IndexModel& model);

/// First-order expansion only; the caller owns the validity range in x.
double implied_variance_expansion(const SmileAsymptotics& sa, double x);

/// x_i* = (xbar / sigma_I^2) sigma_i Sigma_i with Sigma_i = sum_j rho_ij w_j sigma_j.
MostLikelyConfiguration most_likely_configuration(const IndexModel& model, double xbar);

}  // namespace iskew
