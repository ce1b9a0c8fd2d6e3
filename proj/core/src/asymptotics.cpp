#include "iskew/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace iskew {

namespace {

// Sigma_i = sum_j w_j rho_ij sigma_j with rho_ij drawn from row `row` of the correlation.
double weighted_row(const IndexModel& model, std::size_t row) {
  double s = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    s += model.components[j].weight * model.correlation(row, j) * model.components[j].vol.spot();
  }
  return s;
}

double spot_variance_unchecked(const IndexModel& model) {
  double v = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    v += model.components[i].weight * model.components[i].vol.spot() * weighted_row(model, i);
  }
  return v;
}

SmileAsymptotics finish(double spot_variance, double variance_skew) {
  return {spot_variance, variance_skew, variance_skew / (2.0 * std::sqrt(spot_variance))};
}

}  // namespace

double index_spot_variance(const IndexModel& model) {
  require_valid(model);
  return spot_variance_unchecked(model);
}

double single_asset_skew(const Component& c) {
  if (!(c.vol.sigma > 0.0) || !std::isfinite(c.vol.eta)) {
    throw std::invalid_argument("single_asset_skew: component needs sigma > 0 and finite eta");
  }
  return c.vol.spot_slope() / c.vol.spot() * kappa(c.hurst);
}

SmileAsymptotics index_skew_one_factor(const IndexModel& model) {
  require_valid(model);
  if (model.mode != FactorMode::OneFactor) {
    throw std::invalid_argument("index_skew_one_factor requires a one_factor model");
  }
  const double var = spot_variance_unchecked(model);
  double acc = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& c = model.components[i];
    const double big_sigma = weighted_row(model, i);
    const double second = 2.0 * c.vol.spot_slope() * kappa(c.hurst);  // phi_i0''(Id, Id)
    acc += c.weight * big_sigma * big_sigma * (second + c.vol.spot() * c.vol.spot());
  }
  return finish(var, -var + acc / var);
}

SmileAsymptotics index_skew_two_factor(const IndexModel& model) {
  require_valid(model);
  if (model.mode != FactorMode::TwoFactor) {
    throw std::invalid_argument("index_skew_two_factor requires a two_factor model");
  }
  const std::size_t n = model.size();
  const double var = spot_variance_unchecked(model);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = model.components[i];
    const double cross = c.vol.spot_slope() * kappa(c.hurst);  // off-diagonal of Phi_i
    // sum_{j,l} w_j w_l s_j s_l P_il^T Phi_i P_ij with P_il = (rho_{i,l}, rho_{N+i,l})
    // collapses to 2 * cross * Sigma_i * V_i for a zero-diagonal Phi_i.
    const double price_row = weighted_row(model, i);
    const double vol_row = weighted_row(model, n + i);
    const double phi_term = 2.0 * cross * price_row * vol_row;
    const double s = c.vol.spot() * price_row;
    acc += c.weight * (phi_term + s * s);
  }
  return finish(var, -var + acc / var);
}

SmileAsymptotics index_skew(const IndexModel& model) {
  return model.mode == FactorMode::TwoFactor ? index_skew_two_factor(model)
                                             : index_skew_one_factor(model);
}

double implied_variance_expansion(const SmileAsymptotics& sa, double x) {
  return sa.spot_variance + x * sa.variance_skew;
}

MostLikelyConfiguration most_likely_configuration(const IndexModel& model, double xbar) {
  require_valid(model);
  const double var = spot_variance_unchecked(model);
  MostLikelyConfiguration out{xbar, std::vector<double>(model.size(), 0.0)};
  for (std::size_t i = 0; i < model.size(); ++i) {
    out.xstar[i] = xbar / var * model.components[i].vol.spot() * weighted_row(model, i);
  }
  return out;
}

}  // namespace iskew
