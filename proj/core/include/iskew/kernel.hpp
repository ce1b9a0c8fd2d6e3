#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace iskew {

/// Hurst exponent of a Riemann-Liouville fractional driver, restricted to (0, 1/2].
class HurstParam {
 public:
  explicit HurstParam(double h);

  double value() const noexcept { return h_; }

  bool operator==(const HurstParam&) const = default;

 private:
  double h_;
};

/// Uniform grid t_k = k / m on [0, 1].
class PathGrid {
 public:
  explicit PathGrid(std::size_t steps);

  std::size_t steps() const noexcept { return m_; }
  double dt() const noexcept { return 1.0 / static_cast<double>(m_); }
  double time(std::size_t k) const noexcept {
    return static_cast<double>(k) / static_cast<double>(m_);
  }

  bool operator==(const PathGrid&) const = default;

 private:
  std::size_t m_;
};

/// Cameron-Martin path with constant velocity on every cell [t_k, t_{k+1}).
/// The represented path starts at zero and is continuous.
class VelocityPath {
 public:
  VelocityPath(PathGrid grid, std::vector<double> velocity);

  static VelocityPath zero(PathGrid grid);
  static VelocityPath constant(PathGrid grid, double velocity);

  const PathGrid& grid() const noexcept { return grid_; }
  std::span<const double> velocity() const noexcept { return v_; }
  std::span<double> velocity() noexcept { return v_; }

  /// h(t_k), k = 0..m.
  double value_at_node(std::size_t k) const;
  double terminal() const { return value_at_node(grid_.steps()); }

 private:
  PathGrid grid_;
  std::vector<double> v_;
};

/// Cell integrals of the kernel K^H(t, s) = sqrt(2H) (t - s)^(H - 1/2):
///
///   w[k][j] = int_{t_j}^{t_{j+1}} K^H(t_k, s) ds,   0 <= j < k <= m.
///
/// On a uniform grid the table is Toeplitz, so only the m lag values are stored.
/// Immutable after construction.
class KernelWeights {
 public:
  KernelWeights(HurstParam h, PathGrid grid);

  HurstParam hurst() const noexcept { return h_; }
  const PathGrid& grid() const noexcept { return grid_; }

  /// w[k][j]; zero when j >= k.
  double operator()(std::size_t k, std::size_t j) const;

  /// Weight at lag d = k - j, 1 <= d <= m.
  double lag(std::size_t d) const { return lag_.at(d); }

  /// nodes[k] = sum_{j<k} w[k][j] v[j] for k in [0, nodes.size()); nodes.size() <= m + 1.
  void lift(std::span<const double> v, std::span<double> nodes) const;

  /// Cell midpoint values mid[k] = (nodes[k] + nodes[k+1]) / 2, k = 0..m-1.
  void lift_midpoints(std::span<const double> v, std::span<double> mid) const;

  /// Transpose of lift_midpoints: out[j] = sum_k d mid[k] / d v[j] * y[k].
  void lift_midpoints_adjoint(std::span<const double> y, std::span<double> out) const;

 private:
  HurstParam h_;
  PathGrid grid_;
  std::vector<double> lag_;       // lag_[d], d = 0..m, lag_[0] = 0
  std::vector<double> reversed_;  // reversed_[i] = lag_[m - i], i = 0..m-1
};

double kernel_value(HurstParam h, double t, double s);

/// <K^H 1, 1> = sqrt(2H) / ((H + 1/2)(H + 3/2)).
double kappa(HurstParam h);

/// Lifted path values hat h(t_k) = int_0^{t_k} K^H(t_k, s) dh_s at every node.
std::vector<double> lift_path(HurstParam h, const VelocityPath& p);

/// Trapezoidal outer integral of the lifted unit-speed path on an m-step grid.
double kappa_numeric(HurstParam h, std::size_t m);

}  // namespace iskew
