#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "iskew/implied_vol.hpp"
#include "iskew/model.hpp"

namespace iskew {

struct McConfig {
  double epsilon = 0.1;          // noise scale
  std::size_t n_steps = 256;     // time steps on [0, 1]
  std::size_t n_paths = 200000;  // rounded up to even with antithetic pairs
  std::uint64_t seed = 20240901;
  bool antithetic = true;
};

/// Empty when the configuration is usable.
std::vector<std::string> validate(const McConfig& cfg);

/// Terminal index log-prices J_1 = log I_1, in path order. With antithetic sampling,
/// entries 2p and 2p + 1 form a pair driven by opposite Gaussian draws.
struct TerminalSample {
  std::vector<double> log_index;
  bool antithetic = false;
};

/// Simulates
///
///   dS^i / S^i = f_i(eps What^i) d(eps W^i),   What^i_t = int_0^t K^{H_i}(t, s) dW^{vol(i)}_s,
///
/// with an exact-log Euler step per cell and What built from the cell-exact kernel weights
/// applied to the driver increments. Each path (or antithetic pair) draws from its own stream
/// derived from (seed, path index), so the sample does not depend on the worker count.
TerminalSample simulate_terminal(const IndexModel& model, const McConfig& cfg, unsigned threads = 0);

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// P[J > x]
Estimate digital_price(const TerminalSample& sample, double x);

/// E[(e^J - e^x)^+] or E[(e^x - e^J)^+]; Auto picks the out-of-the-money side.
Estimate vanilla_price(const TerminalSample& sample, double x, OptionSide side = OptionSide::Auto);

/// E[I_1] = E[e^J]; equals 1 for the martingale index.
Estimate index_mean(const TerminalSample& sample);

struct McSmileRow {
  double x = 0.0;
  double digital = 0.0;
  double digital_se = 0.0;
  double price = 0.0;
  double price_se = 0.0;
  double implied_vol = 0.0;  // total Black-Scholes vol; divide by epsilon for the model scale
  double iv_lo = 0.0;
  double iv_hi = 0.0;
  std::string flag = "ok";
};

/// One simulation reused across strikes. The band inverts price -/+ 1.96 standard errors.
std::vector<McSmileRow> mc_smile(const IndexModel& model, const McConfig& cfg,
                                 std::span<const double> xs, unsigned threads = 0);

std::vector<McSmileRow> smile_from_sample(const TerminalSample& sample, std::span<const double> xs);

/// Header x,digital,digital_se,price,price_se,implied_vol,iv_lo,iv_hi,flag.
void write_mc_smile_csv(std::ostream& out, std::span<const McSmileRow> rows);

struct RateCheckOptions {
  std::size_t min_exceedances = 200;  // paths are scaled up until this many exceed x
  std::size_t max_paths = 20000000;
};

struct RateRow {
  double epsilon = 0.0;
  double p_hat = 0.0;
  double eps2_log_p = 0.0;
  double neg_lambda = 0.0;
  double gap = 0.0;  // |eps^2 log p_hat + Lambda(x)|
  std::size_t paths = 0;
  std::size_t exceedances = 0;
  bool flagged = false;  // rare event: too few exceedances even at max_paths
};

/// Convergence table of eps^2 log P[J > x] towards -Lambda(x), one row per epsilon.
/// For x < 0 the lower tail P[J < x] is used.
std::vector<RateRow> rate_check(const IndexModel& model, double x, double lambda,
                                std::span<const double> epsilons, const McConfig& cfg_template,
                                const RateCheckOptions& options = {}, unsigned threads = 0);

/// Header epsilon,p_hat,eps2_log_p,neg_lambda,gap.
void write_rate_csv(std::ostream& out, std::span<const RateRow> rows);

}  // namespace iskew
