#include "iskew/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace iskew::opt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Point {
  std::vector<double> x;
  std::vector<double> g;
  double f = 0.0;
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), clamped into
// the interior of [min(a,b), max(a,b)].
double cubic_step(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  const double lo = std::min(a, b), hi = std::max(a, b);
  double t = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom != 0.0) t = b - (b - a) * (db + d2 - d1) / denom;
  }
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(t) || t < lo + margin || t > hi - margin) t = 0.5 * (a + b);
  return t;
}

class LineSearch {
 public:
  LineSearch(const GradientFunction& f, const Point& start, std::span<const double> dir,
             std::size_t& evals)
      : f_(f), start_(start), dir_(dir), evals_(evals), trial_{start.x, start.g, start.f} {
    d0_ = dot(start.g, dir);
  }

  // Strong Wolfe conditions with c1 = 1e-4, c2 = 0.9.
  bool run(double alpha0, Point& out) {
    if (!(d0_ < 0.0)) return false;
    double prev_alpha = 0.0, prev_f = start_.f, prev_d = d0_;
    double alpha = alpha0;
    for (int it = 0; it < 40; ++it) {
      const double d = evaluate(alpha);
      if (!std::isfinite(trial_.f) || trial_.f > start_.f + kC1 * alpha * d0_ ||
          (it > 0 && trial_.f >= prev_f)) {
        return zoom(prev_alpha, prev_f, prev_d, alpha, trial_.f, d, out);
      }
      if (std::abs(d) <= -kC2 * d0_) {
        out = trial_;
        return true;
      }
      if (d >= 0.0) return zoom(alpha, trial_.f, d, prev_alpha, prev_f, prev_d, out);
      prev_alpha = alpha;
      prev_f = trial_.f;
      prev_d = d;
      alpha *= 2.0;
    }
    return false;
  }

 private:
  static constexpr double kC1 = 1e-4;
  static constexpr double kC2 = 0.9;

  double evaluate(double alpha) {
    for (std::size_t i = 0; i < trial_.x.size(); ++i) trial_.x[i] = start_.x[i] + alpha * dir_[i];
    trial_.f = f_(trial_.x, trial_.g);
    ++evals_;
    return dot(trial_.g, dir_);
  }

  bool zoom(double lo, double f_lo, double d_lo, double hi, double f_hi, double d_hi, Point& out) {
    Point best_lo;
    bool have_lo = false;
    for (int it = 0; it < 60; ++it) {
      double alpha = std::isfinite(f_hi) ? cubic_step(lo, f_lo, d_lo, hi, f_hi, d_hi) : 0.5 * (lo + hi);
      if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      const double d = evaluate(alpha);
      if (!std::isfinite(trial_.f) || trial_.f > start_.f + kC1 * alpha * d0_ || trial_.f >= f_lo) {
        hi = alpha;
        f_hi = trial_.f;
        d_hi = d;
      } else {
        if (std::abs(d) <= -kC2 * d0_) {
          out = trial_;
          return true;
        }
        if (d * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          d_hi = d_lo;
        }
        lo = alpha;
        f_lo = trial_.f;
        d_lo = d;
        best_lo = trial_;
        have_lo = true;
      }
    }
    // Accept a point with sufficient decrease even if curvature is not met.
    if (have_lo && best_lo.f < start_.f) {
      out = best_lo;
      return true;
    }
    return false;
  }

  const GradientFunction& f_;
  const Point& start_;
  std::span<const double> dir_;
  std::size_t& evals_;
  Point trial_;
  double d0_ = 0.0;
};

}  // namespace

LbfgsResult minimize_lbfgs(const GradientFunction& f, std::vector<double> x0,
                           const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  Point cur{std::move(x0), std::vector<double>(n), 0.0};
  cur.f = f(cur.x, cur.g);
  result.evaluations = 1;

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;
  std::vector<double> dir(n), alpha(options.memory + 1);

  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    const double gnorm = norm(cur.g);
    if (!std::isfinite(cur.f) || !std::isfinite(gnorm)) break;
    if (gnorm <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    // Two-loop recursion.
    for (std::size_t i = 0; i < n; ++i) dir[i] = -cur.g[i];
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * dot(history[k].s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[k] * history[k].y[i];
    }
    double gamma = 1.0;
    if (!history.empty()) {
      const auto& last = history.back();
      gamma = dot(last.s, last.y) / dot(last.y, last.y);
    }
    for (auto& d : dir) d *= gamma;
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * dot(history[k].y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[k] - beta) * history[k].s[i];
    }
    if (dot(dir, cur.g) >= 0.0) {
      history.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -cur.g[i];
    }

    const double alpha0 = history.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    Point next;
    LineSearch search(f, cur, dir, result.evaluations);
    if (!search.run(alpha0, next)) {
      if (history.empty()) break;
      history.clear();  // restart from steepest descent
      continue;
    }

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = next.x[i] - cur.x[i];
      p.y[i] = next.g[i] - cur.g[i];
    }
    const double sy = dot(p.s, p.y);
    const bool stalled = std::abs(next.f - cur.f) <= 1e-16 * std::max(1.0, std::abs(cur.f)) &&
                         norm(p.s) <= 1e-16 * std::max(1.0, norm(cur.x));
    cur = std::move(next);
    if (sy > 1e-300) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > options.memory) history.pop_front();
    }
    if (stalled) break;
  }

  result.iterations = it;
  result.gradient_norm = norm(cur.g);
  result.converged = result.converged || result.gradient_norm <= options.gradient_tolerance;
  result.value = cur.f;
  result.x = std::move(cur.x);
  return result;
}

AugmentedLagrangianResult minimize_augmented_lagrangian(const GradientFunction& objective,
                                                        const GradientFunction& constraint,
                                                        std::vector<double> x0, double lambda0,
                                                        const AugmentedLagrangianOptions& options) {
  const std::size_t n = x0.size();
  std::vector<double> gf(n), gc(n);

  AugmentedLagrangianResult result;
  result.x = std::move(x0);
  double lambda = lambda0;

  double c = constraint(result.x, gc);
  const double gc_norm0 = std::max(norm(gc), 1e-8);
  double mu = 10.0 / (gc_norm0 * gc_norm0);
  double prev_violation = std::abs(c);

  LbfgsOptions inner = options.inner;
  for (std::size_t outer = 0; outer < options.max_outer_iterations; ++outer) {
    result.outer_iterations = outer + 1;
    const double lam = lambda, pen = mu;
    const GradientFunction merit = [&](std::span<const double> x, std::span<double> g) {
      std::vector<double> g1(n), g2(n);
      const double fv = objective(x, g1);
      const double cv = constraint(x, g2);
      const double coeff = -lam + pen * cv;
      for (std::size_t i = 0; i < n; ++i) g[i] = g1[i] + coeff * g2[i];
      return fv - lam * cv + 0.5 * pen * cv * cv;
    };
    inner.gradient_tolerance = 0.1 * options.stationarity_tolerance;
    auto sub = minimize_lbfgs(merit, result.x, inner);
    result.x = std::move(sub.x);

    const double fv = objective(result.x, gf);
    c = constraint(result.x, gc);
    lambda = lambda - mu * c;

    double stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) stat += std::pow(gf[i] - lambda * gc[i], 2);
    stat = std::sqrt(stat);

    result.objective = fv;
    result.constraint = c;
    result.stationarity = stat;
    result.multiplier = lambda;
    if (!std::isfinite(fv) || !std::isfinite(c)) break;
    if (std::abs(c) <= options.constraint_tolerance && stat <= options.stationarity_tolerance) {
      result.converged = true;
      break;
    }
    if (std::abs(c) > 0.25 * prev_violation) mu = std::min(mu * options.penalty_growth, options.max_penalty);
    prev_violation = std::abs(c);
  }
  return result;
}

}  // namespace iskew::opt
