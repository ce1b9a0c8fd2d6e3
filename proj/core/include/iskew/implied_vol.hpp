#pragma once

namespace iskew {

enum class OptionSide { Call, Put, Auto };

/// Auto resolves to the out-of-the-money side: calls for x >= 0, puts for x < 0.
OptionSide resolve_side(OptionSide side, double x) noexcept;

/// Black-Scholes price for unit spot, unit maturity, strike e^x and total volatility.
double bs_price(double total_vol, double x, OptionSide side);

/// Bachelier price on the log-price: X ~ N(0, vol^2), payoff (X - x)^+ or (x - X)^+.
double bachelier_price(double normal_vol, double x, OptionSide side);

enum class ImpliedVolStatus { Ok, BelowLowerBound, AboveUpperBound };

struct ImpliedVol {
  double value = 0.0;
  ImpliedVolStatus status = ImpliedVolStatus::Ok;

  bool ok() const noexcept { return status == ImpliedVolStatus::Ok; }
};

/// Bracketing inversion on total vol in [1e-8, 5], price tolerance 1e-12.
/// Prices at or below intrinsic report BelowLowerBound with value 0; prices at or above
/// the upper no-arbitrage bound report AboveUpperBound with value +inf.
ImpliedVol implied_vol_bs(double price, double x, OptionSide side);

/// Same contract as implied_vol_bs, for the Bachelier log-price formula.
ImpliedVol implied_vol_bachelier(double price, double x, OptionSide side);

/// Normal vol matching a digital probability P[X > x] = Phi(-x / vol).
double bachelier_vol_from_digital(double probability, double x);

}  // namespace iskew
