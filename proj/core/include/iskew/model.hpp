#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iskew/kernel.hpp"

namespace iskew {

enum class VolFamily { RoughBergomi };

/// f(v) = sigma * exp(eta * v). The sign of eta carries the price/vol orientation
/// of the one-factor model.
struct VolFunction {
  VolFamily family = VolFamily::RoughBergomi;
  double sigma = 0.0;
  double eta = 0.0;

  double operator()(double v) const { return sigma * std::exp(eta * v); }
  double derivative(double v) const { return eta * sigma * std::exp(eta * v); }

  /// f(0)
  double spot() const { return sigma; }
  /// f'(0)
  double spot_slope() const { return eta * sigma; }
};

/// One index constituent with unit initial price.
struct Component {
  double weight = 0.0;
  VolFunction vol;
  HurstParam hurst{0.5};
};

/// Symmetric table of driver correlations, stored row-major.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(std::vector<std::vector<double>> rows);

  static CorrelationMatrix identity(std::size_t n);
  static CorrelationMatrix equicorrelated(std::size_t n, double rho);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

enum class FactorMode { OneFactor, TwoFactor };

/// Index I = sum_i w_i S^i over components with rough volatility.
///
/// OneFactor: N drivers, the vol of component i is driven by its own price driver.
/// TwoFactor: 2N drivers; rows/cols [0, N) are price drivers and [N, 2N) vol drivers,
/// vol driver of component i being N + i.
struct IndexModel {
  std::vector<Component> components;
  CorrelationMatrix correlation = CorrelationMatrix::identity(1);
  FactorMode mode = FactorMode::OneFactor;

  std::size_t size() const noexcept { return components.size(); }
  std::size_t drivers() const noexcept {
    return mode == FactorMode::TwoFactor ? 2 * size() : size();
  }
  std::size_t vol_driver(std::size_t i) const noexcept {
    return mode == FactorMode::TwoFactor ? size() + i : i;
  }
};

/// Thrown by operations that require a valid model.
class InvalidModel : public std::invalid_argument {
 public:
  explicit InvalidModel(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Human-readable violations; empty when the model is valid.
std::vector<std::string> validate(const IndexModel& model);

void require_valid(const IndexModel& model);

/// Dense lower-triangular Cholesky factor, row-major.
class LowerTriangular {
 public:
  LowerTriangular(std::size_t n, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  /// y = L x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = L^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;
  /// Solve L y = b
  std::vector<double> solve(std::span<const double> b) const;

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

/// L with L L^T = corr. Throws std::invalid_argument("correlation not positive definite").
LowerTriangular cholesky(const CorrelationMatrix& corr);

/// u^T rho^{-1} v via triangular solves against the Cholesky factor.
double rho_inverse_quadratic(const CorrelationMatrix& corr, std::span<const double> u,
                             std::span<const double> v);

}  // namespace iskew
