#include "iskew/implied_vol.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace iskew {

namespace {

constexpr double kVolLow = 1e-8;
constexpr double kVolHigh = 5.0;
constexpr double kPriceTolerance = 1e-12;

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

template <class Pricer>
ImpliedVol invert(Pricer price_at, double price, double lower_bound, double upper_bound) {
  if (!std::isfinite(price) || price <= lower_bound) {
    return {0.0, ImpliedVolStatus::BelowLowerBound};
  }
  if (price >= upper_bound) {
    return {std::numeric_limits<double>::infinity(), ImpliedVolStatus::AboveUpperBound};
  }
  const auto residual = [&](double vol) { return price_at(vol) - price; };
  const double r_lo = residual(kVolLow);
  if (r_lo >= 0.0) return {kVolLow, ImpliedVolStatus::Ok};
  const double r_hi = residual(kVolHigh);
  if (r_hi <= 0.0) return {kVolHigh, ImpliedVolStatus::Ok};

  // Stop on the price residual rather than on the bracket width.
  double last_residual = std::numeric_limits<double>::infinity();
  const auto tol = [&](double a, double b) {
    return std::abs(last_residual) <= kPriceTolerance || std::abs(b - a) <= 1e-15 * std::abs(b);
  };
  const auto tracked = [&](double vol) {
    last_residual = residual(vol);
    return last_residual;
  };
  std::uintmax_t max_iter = 200;
  const auto bracket =
      boost::math::tools::toms748_solve(tracked, kVolLow, kVolHigh, r_lo, r_hi, tol, max_iter);
  const double a = bracket.first, b = bracket.second;
  return {std::abs(residual(a)) < std::abs(residual(b)) ? a : b, ImpliedVolStatus::Ok};
}

}  // namespace

OptionSide resolve_side(OptionSide side, double x) noexcept {
  if (side != OptionSide::Auto) return side;
  return x < 0.0 ? OptionSide::Put : OptionSide::Call;
}

double bs_price(double total_vol, double x, OptionSide side) {
  side = resolve_side(side, x);
  const double strike = std::exp(x);
  if (total_vol <= 0.0) {
    return side == OptionSide::Call ? std::max(1.0 - strike, 0.0) : std::max(strike - 1.0, 0.0);
  }
  const double d1 = -x / total_vol + 0.5 * total_vol;
  const double d2 = d1 - total_vol;
  if (side == OptionSide::Call) return norm_cdf(d1) - strike * norm_cdf(d2);
  return strike * norm_cdf(-d2) - norm_cdf(-d1);
}

double bachelier_price(double normal_vol, double x, OptionSide side) {
  side = resolve_side(side, x);
  if (normal_vol <= 0.0) return side == OptionSide::Call ? std::max(-x, 0.0) : std::max(x, 0.0);
  const double z = x / normal_vol;
  if (side == OptionSide::Call) return normal_vol * norm_pdf(z) - x * norm_cdf(-z);
  return normal_vol * norm_pdf(z) + x * norm_cdf(z);
}

ImpliedVol implied_vol_bs(double price, double x, OptionSide side) {
  side = resolve_side(side, x);
  const double strike = std::exp(x);
  const double intrinsic = side == OptionSide::Call ? std::max(1.0 - strike, 0.0) : std::max(strike - 1.0, 0.0);
  const double upper = side == OptionSide::Call ? 1.0 : strike;
  return invert([&](double v) { return bs_price(v, x, side); }, price, intrinsic, upper);
}

ImpliedVol implied_vol_bachelier(double price, double x, OptionSide side) {
  side = resolve_side(side, x);
  const double intrinsic = side == OptionSide::Call ? std::max(-x, 0.0) : std::max(x, 0.0);
  return invert([&](double v) { return bachelier_price(v, x, side); }, price, intrinsic,
                std::numeric_limits<double>::infinity());
}

double bachelier_vol_from_digital(double probability, double x) {
  if (!(probability > 0.0 && probability < 1.0)) {
    throw std::invalid_argument("digital probability must lie in (0, 1)");
  }
  const boost::math::normal_distribution<double> n01;
  const double q = boost::math::quantile(n01, probability);
  if (q == 0.0 || x == 0.0) throw std::invalid_argument("digital vol undefined at the money");
  const double vol = -x / q;
  if (!(vol > 0.0)) throw std::invalid_argument("digital probability inconsistent with the strike side");
  return vol;
}

}  // namespace iskew
