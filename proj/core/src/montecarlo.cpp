#include "iskew/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "iskew/csv.hpp"
#include "iskew/kernel.hpp"
#include "iskew/parallel.hpp"

namespace iskew {

namespace {

constexpr double kBandZ = 1.96;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class Payoff>
Estimate estimate(const TerminalSample& sample, Payoff payoff) {
  const auto& j = sample.log_index;
  if (j.empty()) throw std::invalid_argument("empty Monte Carlo sample");
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  if (sample.antithetic) {
    for (std::size_t p = 0; p + 1 < j.size(); p += 2) {
      const double y = 0.5 * (payoff(j[p]) + payoff(j[p + 1]));
      sum += y;
      sum_sq += y * y;
      ++count;
    }
  } else {
    for (double v : j) {
      const double y = payoff(v);
      sum += y;
      sum_sq += y * y;
    }
    count = j.size();
  }
  const double mean = sum / double(count);
  const double var = count > 1 ? std::max(0.0, (sum_sq - double(count) * mean * mean) / double(count - 1)) : 0.0;
  return {mean, std::sqrt(var / double(count))};
}

}  // namespace

std::vector<std::string> validate(const McConfig& cfg) {
  std::vector<std::string> out;
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) out.emplace_back("epsilon must lie in (0, 1]");
  if (cfg.n_steps < 8) out.emplace_back("n_steps must be at least 8");
  if (cfg.n_paths < 1000) out.emplace_back("n_paths must be at least 1000");
  return out;
}

TerminalSample simulate_terminal(const IndexModel& model, const McConfig& cfg, unsigned threads) {
  require_valid(model);
  if (const auto bad = validate(cfg); !bad.empty()) throw std::invalid_argument("invalid McConfig: " + bad.front());

  const std::size_t n = cfg.n_steps;
  const std::size_t comps = model.size();
  const std::size_t d = model.drivers();
  const double dt = 1.0 / double(n);
  const double sqrt_dt = std::sqrt(dt);
  const double eps = cfg.epsilon;
  const auto chol = cholesky(model.correlation);
  const PathGrid grid(n);
  std::vector<KernelWeights> weights;
  std::vector<double> log_w;
  for (const auto& c : model.components) {
    weights.emplace_back(c.hurst, grid);
    log_w.push_back(std::log(c.weight));
  }

  const std::size_t total = cfg.antithetic ? cfg.n_paths + (cfg.n_paths % 2) : cfg.n_paths;
  const std::size_t units = cfg.antithetic ? total / 2 : total;
  TerminalSample sample;
  sample.antithetic = cfg.antithetic;
  sample.log_index.resize(total);

  parallel_chunks(units, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> z(d), lz(d);
    std::vector<double> dw(d * n);       // driver-major increments
    std::vector<double> speed(n), what(n);
    std::vector<double> log_s(2 * comps);
    std::normal_distribution<double> normal;
    for (std::size_t unit = begin; unit < end; ++unit) {
      std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(unit + 1)));
      normal.reset();
      for (std::size_t k = 0; k < n; ++k) {
        for (auto& e : z) e = normal(rng);
        chol.multiply(z, lz);
        for (std::size_t r = 0; r < d; ++r) dw[r * n + k] = lz[r] * sqrt_dt;
      }
      for (std::size_t i = 0; i < comps; ++i) {
        const auto& f = model.components[i].vol;
        const double* price = dw.data() + i * n;
        const double* vol = dw.data() + model.vol_driver(i) * n;
        for (std::size_t k = 0; k < n; ++k) speed[k] = vol[k] / dt;
        weights[i].lift(speed, what);
        // The antithetic path flips every increment, hence also What.
        double up = 0.0, down = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double s_up = f(eps * what[k]);
          up += eps * s_up * price[k] - 0.5 * eps * eps * s_up * s_up * dt;
          if (cfg.antithetic) {
            const double s_dn = f(-eps * what[k]);
            down += -eps * s_dn * price[k] - 0.5 * eps * eps * s_dn * s_dn * dt;
          }
        }
        log_s[i] = log_w[i] + up;
        log_s[comps + i] = log_w[i] + down;
      }
      const auto log_sum_exp = [&](std::size_t offset) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < comps; ++i) top = std::max(top, log_s[offset + i]);
        double s = 0.0;
        for (std::size_t i = 0; i < comps; ++i) s += std::exp(log_s[offset + i] - top);
        return top + std::log(s);
      };
      if (cfg.antithetic) {
        sample.log_index[2 * unit] = log_sum_exp(0);
        sample.log_index[2 * unit + 1] = log_sum_exp(comps);
      } else {
        sample.log_index[unit] = log_sum_exp(0);
      }
    }
  });
  return sample;
}

Estimate digital_price(const TerminalSample& sample, double x) {
  if (sample.log_index.empty()) throw std::invalid_argument("empty Monte Carlo sample");
  if (!sample.antithetic) {
    const auto hits = std::count_if(sample.log_index.begin(), sample.log_index.end(),
                                    [x](double j) { return j > x; });
    const double n = double(sample.log_index.size());
    const double p = double(hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
  }
  return estimate(sample, [x](double j) { return j > x ? 1.0 : 0.0; });
}

Estimate vanilla_price(const TerminalSample& sample, double x, OptionSide side) {
  const double strike = std::exp(x);
  if (resolve_side(side, x) == OptionSide::Call) {
    return estimate(sample, [strike](double j) { return std::max(std::exp(j) - strike, 0.0); });
  }
  return estimate(sample, [strike](double j) { return std::max(strike - std::exp(j), 0.0); });
}

Estimate index_mean(const TerminalSample& sample) {
  return estimate(sample, [](double j) { return std::exp(j); });
}

std::vector<McSmileRow> smile_from_sample(const TerminalSample& sample, std::span<const double> xs) {
  std::vector<McSmileRow> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    McSmileRow row;
    row.x = x;
    const auto dig = digital_price(sample, x);
    row.digital = dig.value;
    row.digital_se = dig.standard_error;
    const OptionSide side = resolve_side(OptionSide::Auto, x);
    const auto px = vanilla_price(sample, x, side);
    row.price = px.value;
    row.price_se = px.standard_error;

    const auto mid = implied_vol_bs(px.value, x, side);
    const auto lo = implied_vol_bs(px.value - kBandZ * px.standard_error, x, side);
    const auto hi = implied_vol_bs(px.value + kBandZ * px.standard_error, x, side);
    if (!mid.ok()) {
      row.implied_vol = std::numeric_limits<double>::quiet_NaN();
      row.flag = "no_implied_vol";
    } else {
      row.implied_vol = mid.value;
    }
    row.iv_lo = lo.value;
    row.iv_hi = hi.value;
    if (mid.ok() && !lo.ok()) row.flag = "band_lo_clipped";
    if (mid.ok() && !hi.ok()) row.flag = "band_hi_clipped";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<McSmileRow> mc_smile(const IndexModel& model, const McConfig& cfg,
                                 std::span<const double> xs, unsigned threads) {
  return smile_from_sample(simulate_terminal(model, cfg, threads), xs);
}

void write_mc_smile_csv(std::ostream& out, std::span<const McSmileRow> rows) {
  out << "x,digital,digital_se,price,price_se,implied_vol,iv_lo,iv_hi,flag\n";
  for (const auto& r : rows) {
    out << csv_number(r.x) << ',' << csv_number(r.digital) << ',' << csv_number(r.digital_se) << ','
        << csv_number(r.price) << ',' << csv_number(r.price_se) << ',' << csv_number(r.implied_vol) << ','
        << csv_number(r.iv_lo) << ',' << csv_number(r.iv_hi) << ',' << r.flag << '\n';
  }
}

std::vector<RateRow> rate_check(const IndexModel& model, double x, double lambda,
                                std::span<const double> epsilons, const McConfig& cfg_template,
                                const RateCheckOptions& options, unsigned threads) {
  std::vector<RateRow> rows;
  for (double eps : epsilons) {
    McConfig cfg = cfg_template;
    cfg.epsilon = eps;
    RateRow row;
    row.epsilon = eps;
    row.neg_lambda = -lambda;
    while (true) {
      const auto sample = simulate_terminal(model, cfg, threads);
      const auto hits = static_cast<std::size_t>(
          std::count_if(sample.log_index.begin(), sample.log_index.end(),
                        [x](double j) { return x >= 0.0 ? j > x : j < x; }));
      row.paths = sample.log_index.size();
      row.exceedances = hits;
      if (hits >= options.min_exceedances || cfg.n_paths >= options.max_paths) break;
      // Paths are indexed streams, so a larger run extends the previous one.
      const double factor = 1.25 * double(options.min_exceedances) / double(std::max<std::size_t>(hits, 1));
      cfg.n_paths = std::min(options.max_paths,
                             static_cast<std::size_t>(std::ceil(double(cfg.n_paths) * std::min(factor, 100.0))));
    }
    row.p_hat = double(row.exceedances) / double(row.paths);
    row.flagged = row.exceedances < options.min_exceedances;
    row.eps2_log_p = row.p_hat > 0.0 ? eps * eps * std::log(row.p_hat) : -std::numeric_limits<double>::infinity();
    row.gap = std::abs(row.eps2_log_p + lambda);
    rows.push_back(row);
  }
  return rows;
}

void write_rate_csv(std::ostream& out, std::span<const RateRow> rows) {
  out << "epsilon,p_hat,eps2_log_p,neg_lambda,gap\n";
  for (const auto& r : rows) {
    out << csv_number(r.epsilon) << ',' << csv_number(r.p_hat) << ',' << csv_number(r.eps2_log_p) << ','
        << csv_number(r.neg_lambda) << ',' << csv_number(r.gap) << '\n';
  }
}

}  // namespace iskew
