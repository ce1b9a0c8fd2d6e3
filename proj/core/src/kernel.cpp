#include "iskew/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iskew {

namespace {

// Four independent accumulators; the summation order is fixed, so results do
// not depend on how callers split work across threads.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

HurstParam::HurstParam(double h) : h_(h) {
  if (!(h > 0.0 && h <= 0.5)) {
    throw std::invalid_argument("Hurst parameter must lie in (0, 1/2], got " + std::to_string(h));
  }
}

PathGrid::PathGrid(std::size_t steps) : m_(steps) {
  if (steps == 0) throw std::invalid_argument("path grid needs at least one step");
}

VelocityPath::VelocityPath(PathGrid grid, std::vector<double> velocity)
    : grid_(grid), v_(std::move(velocity)) {
  if (v_.size() != grid_.steps()) {
    throw std::invalid_argument("velocity path length " + std::to_string(v_.size()) +
                                " does not match grid steps " + std::to_string(grid_.steps()));
  }
}

VelocityPath VelocityPath::zero(PathGrid grid) { return constant(grid, 0.0); }

VelocityPath VelocityPath::constant(PathGrid grid, double velocity) {
  return VelocityPath(grid, std::vector<double>(grid.steps(), velocity));
}

double VelocityPath::value_at_node(std::size_t k) const {
  if (k > grid_.steps()) throw std::out_of_range("node index beyond grid");
  double h = 0.0;
  for (std::size_t j = 0; j < k; ++j) h += v_[j];
  return h * grid_.dt();
}

KernelWeights::KernelWeights(HurstParam h, PathGrid grid)
    : h_(h), grid_(grid), lag_(grid.steps() + 1, 0.0), reversed_(grid.steps(), 0.0) {
  const std::size_t m = grid_.steps();
  const double a = h.value() + 0.5;
  if (h.value() == 0.5) {
    // K == 1: every cell integral is exactly dt.
    for (std::size_t d = 1; d <= m; ++d) lag_[d] = grid_.dt();
  } else {
    const double scale = std::sqrt(2.0 * h.value()) / a * std::pow(grid_.dt(), a);
    double prev = 0.0;
    for (std::size_t d = 1; d <= m; ++d) {
      const double cur = std::pow(static_cast<double>(d), a);
      lag_[d] = scale * (cur - prev);
      prev = cur;
    }
  }
  for (std::size_t i = 0; i < m; ++i) reversed_[i] = lag_[m - i];
}

double KernelWeights::operator()(std::size_t k, std::size_t j) const {
  if (k > grid_.steps() || j >= grid_.steps()) throw std::out_of_range("kernel weight index");
  return j < k ? lag_[k - j] : 0.0;
}

void KernelWeights::lift(std::span<const double> v, std::span<double> nodes) const {
  const std::size_t m = grid_.steps();
  if (v.size() != m || nodes.size() > m + 1) {
    throw std::invalid_argument("lift: size mismatch with kernel grid");
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    nodes[k] = dot(reversed_.data() + (m - k), v.data(), k);
  }
}

void KernelWeights::lift_midpoints(std::span<const double> v, std::span<double> mid) const {
  const std::size_t m = grid_.steps();
  if (v.size() != m || mid.size() != m) {
    throw std::invalid_argument("lift_midpoints: size mismatch with kernel grid");
  }
  double left = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double right = dot(reversed_.data() + (m - k - 1), v.data(), k + 1);
    mid[k] = 0.5 * (left + right);
    left = right;
  }
}

void KernelWeights::lift_midpoints_adjoint(std::span<const double> y,
                                           std::span<double> out) const {
  const std::size_t m = grid_.steps();
  if (y.size() != m || out.size() != m) {
    throw std::invalid_argument("lift_midpoints_adjoint: size mismatch with kernel grid");
  }
  // Adjoint of the averaging step: node k (1..m) collects half of the cells on either side.
  std::vector<double> z(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    z[k] += 0.5 * y[k];
    z[k + 1] += 0.5 * y[k];
  }
  // Adjoint of the node lift: out[j] = sum_{d=1}^{m-j} lag[d] z[j+d].
  for (std::size_t j = 0; j < m; ++j) {
    out[j] = dot(lag_.data() + 1, z.data() + j + 1, m - j);
  }
}

double kernel_value(HurstParam h, double t, double s) {
  if (!(s >= 0.0 && s < t && t <= 1.0)) {
    throw std::invalid_argument("kernel_value requires 0 <= s < t <= 1");
  }
  return std::sqrt(2.0 * h.value()) * std::pow(t - s, h.value() - 0.5);
}

double kappa(HurstParam h) {
  const double H = h.value();
  return std::sqrt(2.0 * H) / ((H + 0.5) * (H + 1.5));
}

std::vector<double> lift_path(HurstParam h, const VelocityPath& p) {
  const KernelWeights weights(h, p.grid());
  std::vector<double> nodes(p.grid().steps() + 1);
  weights.lift(p.velocity(), nodes);
  return nodes;
}

double kappa_numeric(HurstParam h, std::size_t m) {
  const PathGrid grid(m);
  const auto nodes = lift_path(h, VelocityPath::constant(grid, 1.0));
  double sum = 0.5 * (nodes.front() + nodes.back());
  for (std::size_t k = 1; k < m; ++k) sum += nodes[k];
  return sum * grid.dt();
}

}  // namespace iskew
