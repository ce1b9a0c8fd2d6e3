#include "iskew/energy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "iskew/asymptotics.hpp"
#include "iskew/csv.hpp"
#include "iskew/optimize.hpp"
#include "iskew/parallel.hpp"

namespace iskew {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double norm(std::span<const double> a) {
  return std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
}

std::vector<double> flatten(const IndexModel& model, std::span<const VelocityPath> paths) {
  if (paths.size() != model.drivers()) {
    throw std::invalid_argument("expected " + std::to_string(model.drivers()) + " paths, got " +
                                std::to_string(paths.size()));
  }
  const PathGrid grid = paths.front().grid();
  std::vector<double> v;
  v.reserve(paths.size() * grid.steps());
  for (const auto& p : paths) {
    if (!(p.grid() == grid)) throw std::invalid_argument("paths live on different grids");
    v.insert(v.end(), p.velocity().begin(), p.velocity().end());
  }
  return v;
}

// Whitened coordinates z with v_k = sqrt(m) L z_k cellwise, so that the energy
// (1/(2m)) sum_k v_k^T rho^{-1} v_k equals |z|^2 / 2.
class Whitening {
 public:
  Whitening(const LowerTriangular& l, std::size_t m) : l_(l), m_(m), scale_(std::sqrt(double(m))) {}

  void to_velocity(std::span<const double> z, std::span<double> v) const {
    const std::size_t d = l_.size();
    std::vector<double> a(d), b(d);
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < d; ++i) a[i] = z[i * m_ + k];
      l_.multiply(a, b);
      for (std::size_t i = 0; i < d; ++i) v[i * m_ + k] = scale_ * b[i];
    }
  }

  void gradient_to_whitened(std::span<const double> gv, std::span<double> gz) const {
    const std::size_t d = l_.size();
    std::vector<double> a(d), b(d);
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < d; ++i) a[i] = gv[i * m_ + k];
      l_.multiply_transpose(a, b);
      for (std::size_t i = 0; i < d; ++i) gz[i * m_ + k] = scale_ * b[i];
    }
  }

  std::vector<double> from_velocity(std::span<const double> v) const {
    const std::size_t d = l_.size();
    std::vector<double> z(v.size()), a(d);
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < d; ++i) a[i] = v[i * m_ + k] / scale_;
      const auto b = l_.solve(a);
      for (std::size_t i = 0; i < d; ++i) z[i * m_ + k] = b[i];
    }
    return z;
  }

 private:
  const LowerTriangular& l_;
  std::size_t m_;
  double scale_;
};

struct Candidate {
  std::vector<double> z;
  double energy = std::numeric_limits<double>::infinity();
  double multiplier = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  double stationarity = std::numeric_limits<double>::infinity();
  bool converged = false;
};

}  // namespace

IndexFunctional::IndexFunctional(const IndexModel& model, PathGrid grid) : model_(model), grid_(grid) {
  require_valid(model_);
  weights_.reserve(model_.size());
  for (const auto& c : model_.components) weights_.emplace_back(c.hurst, grid_);
}

double IndexFunctional::value(std::span<const double> v) const {
  const auto parts = component_values(v);
  double top = -std::numeric_limits<double>::infinity();
  for (double p : parts) top = std::max(top, p);
  double sum = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) sum += model_.components[i].weight * std::exp(parts[i] - top);
  return top + std::log(sum);
}

std::vector<double> IndexFunctional::component_values(std::span<const double> v) const {
  if (v.size() != dimension()) throw std::invalid_argument("IndexFunctional: dimension mismatch");
  const std::size_t m = grid_.steps();
  std::vector<double> mid(m), out(model_.size());
  for (std::size_t i = 0; i < model_.size(); ++i) {
    const auto& f = model_.components[i].vol;
    const auto price = v.subspan(i * m, m);
    const auto vol = v.subspan(model_.vol_driver(i) * m, m);
    weights_[i].lift_midpoints(vol, mid);
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += f(mid[k]) * price[k];
    out[i] = s * grid_.dt();
  }
  return out;
}

double IndexFunctional::value_and_gradient(std::span<const double> v, std::span<double> grad) const {
  if (v.size() != dimension() || grad.size() != dimension()) {
    throw std::invalid_argument("IndexFunctional: dimension mismatch");
  }
  const std::size_t m = grid_.steps();
  const std::size_t n = model_.size();
  const double dt = grid_.dt();
  std::fill(grad.begin(), grad.end(), 0.0);

  std::vector<double> mid(m), y(m), adj(m), parts(n);
  std::vector<std::vector<double>> part_grad(n, std::vector<double>(dimension(), 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = model_.components[i].vol;
    const std::size_t p = i, q = model_.vol_driver(i);
    const auto price = v.subspan(p * m, m);
    weights_[i].lift_midpoints(v.subspan(q * m, m), mid);
    auto& g = part_grad[i];
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double fk = f(mid[k]);
      s += fk * price[k];
      g[p * m + k] += fk * dt;
      y[k] = f.derivative(mid[k]) * price[k] * dt;
    }
    parts[i] = s * dt;
    weights_[i].lift_midpoints_adjoint(y, adj);
    for (std::size_t k = 0; k < m; ++k) g[q * m + k] += adj[k];
  }

  double top = -std::numeric_limits<double>::infinity();
  for (double p : parts) top = std::max(top, p);
  std::vector<double> share(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    share[i] = model_.components[i].weight * std::exp(parts[i] - top);
    sum += share[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = share[i] / sum;
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += pi * part_grad[i][k];
  }
  return top + std::log(sum);
}

double phi_component(const Component& c, const VelocityPath& p) { return phi_component(c, p, p); }

double phi_component(const Component& c, const VelocityPath& price, const VelocityPath& vol) {
  if (!(price.grid() == vol.grid())) throw std::invalid_argument("phi_component: grid mismatch");
  const PathGrid grid = price.grid();
  const KernelWeights weights(c.hurst, grid);
  std::vector<double> mid(grid.steps());
  weights.lift_midpoints(vol.velocity(), mid);
  double s = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) s += c.vol(mid[k]) * price.velocity()[k];
  return s * grid.dt();
}

double phi_index(const IndexModel& model, std::span<const VelocityPath> paths) {
  const auto v = flatten(model, paths);
  return IndexFunctional(model, paths.front().grid()).value(v);
}

double energy_objective(const IndexModel& model, std::span<const VelocityPath> paths) {
  const auto v = flatten(model, paths);
  const std::size_t m = paths.front().grid().steps();
  const auto l = cholesky(model.correlation);
  const std::size_t d = model.drivers();
  std::vector<double> cell(d);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < d; ++i) cell[i] = v[i * m + k];
    const auto a = l.solve(cell);
    total += std::inner_product(a.begin(), a.end(), a.begin(), 0.0);
  }
  return 0.5 * total / static_cast<double>(m);
}

EnergyResult solve_energy(const IndexModel& model, double x, const PathGrid& grid,
                          const SolverOptions& options) {
  require_valid(model);
  const std::size_t m = grid.steps();
  const std::size_t d = model.drivers();

  EnergyResult result;
  result.x = x;
  if (std::abs(x) > options.max_abs_x) {
    result.warning = "|x| beyond the asymptotic range; consider more starts";
  }
  if (x == 0.0) {
    for (std::size_t i = 0; i < d; ++i) result.paths.push_back(VelocityPath::zero(grid));
    result.converged = true;
    result.starts_converged = 1;
    return result;
  }

  const IndexFunctional functional(model, grid);
  const auto chol = cholesky(model.correlation);
  const Whitening whiten(chol, m);
  const std::size_t dim = d * m;

  const opt::GradientFunction objective = [](std::span<const double> z, std::span<double> g) {
    std::copy(z.begin(), z.end(), g.begin());
    return 0.5 * std::inner_product(z.begin(), z.end(), z.begin(), 0.0);
  };
  const opt::GradientFunction constraint = [&](std::span<const double> z, std::span<double> g) {
    std::vector<double> v(dim), gv(dim);
    whiten.to_velocity(z, v);
    const double val = functional.value_and_gradient(v, gv);
    whiten.gradient_to_whitened(gv, g);
    return val - x;
  };

  // First-order start: constant velocity x rho phi_0' / sigma0^2, rescaled onto the constraint.
  const double var = index_spot_variance(model);
  std::vector<double> v0(dim);
  for (std::size_t r = 0; r < d; ++r) {
    double a = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) {
      a += model.correlation(r, j) * model.components[j].weight * model.components[j].vol.spot();
    }
    std::fill_n(v0.begin() + static_cast<std::ptrdiff_t>(r * m), m, x * a / var);
  }
  std::vector<double> z0 = whiten.from_velocity(v0);
  {
    std::vector<double> g(dim), trial(dim);
    double s = 1.0;
    for (int it = 0; it < 20; ++it) {
      for (std::size_t i = 0; i < dim; ++i) trial[i] = s * z0[i];
      const double c = constraint(trial, g);
      const double slope = std::inner_product(g.begin(), g.end(), z0.begin(), 0.0);
      if (std::abs(c) < 1e-14 || slope == 0.0 || !std::isfinite(c)) break;
      const double next = s - c / slope;
      if (!(next > 0.1 * s && next < 10.0 * s)) break;
      s = next;
    }
    for (auto& zi : z0) zi *= s;
  }

  opt::AugmentedLagrangianOptions al;
  al.constraint_tolerance = options.constraint_tolerance;
  al.stationarity_tolerance = options.gradient_tolerance;
  al.max_outer_iterations = options.max_outer_iterations;
  al.inner.max_iterations = options.max_inner_iterations;

  std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(std::bit_cast<std::uint64_t>(x))));
  std::normal_distribution<double> normal;
  const double z0_norm = norm(z0);

  std::vector<Candidate> candidates;
  for (std::size_t start = 0; start <= options.extra_starts; ++start) {
    std::vector<double> init = z0;
    if (start > 0) {
      std::vector<double> noise(dim);
      for (auto& e : noise) e = normal(rng);
      const double scale = options.perturbation_scale * z0_norm / norm(noise);
      for (std::size_t i = 0; i < dim; ++i) init[i] += scale * noise[i];
    }
    auto sol = opt::minimize_augmented_lagrangian(objective, constraint, std::move(init), x / var, al);

    // Newton polish of the scalar constraint along its gradient.
    Candidate cand;
    cand.z = std::move(sol.x);
    std::vector<double> g(dim);
    double c = constraint(cand.z, g);
    for (int it = 0; it < 5 && std::isfinite(c) && std::abs(c) > 1e-15; ++it) {
      const double gg = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
      if (gg == 0.0) break;
      for (std::size_t i = 0; i < dim; ++i) cand.z[i] -= c / gg * g[i];
      c = constraint(cand.z, g);
    }
    cand.multiplier = sol.multiplier;
    cand.residual = std::abs(c);
    double stat = 0.0;
    for (std::size_t i = 0; i < dim; ++i) stat += std::pow(cand.z[i] - cand.multiplier * g[i], 2);
    cand.stationarity = std::sqrt(stat);
    cand.energy = 0.5 * std::inner_product(cand.z.begin(), cand.z.end(), cand.z.begin(), 0.0);
    cand.converged = std::isfinite(cand.energy) && cand.residual <= options.constraint_tolerance &&
                     cand.stationarity <= options.gradient_tolerance;
    candidates.push_back(std::move(cand));
  }

  const Candidate* best = nullptr;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : candidates) {
    if (!c.converged) continue;
    ++result.starts_converged;
    lo = std::min(lo, c.energy);
    hi = std::max(hi, c.energy);
    if (best == nullptr || c.energy < best->energy) best = &c;
  }
  if (best == nullptr) {
    for (const auto& c : candidates) {
      if (best == nullptr || c.residual + c.stationarity < best->residual + best->stationarity) best = &c;
    }
  } else {
    result.multistart_spread = hi - lo;
  }

  result.converged = best->converged;
  result.lambda_value = best->energy;
  result.multiplier = best->multiplier;
  result.constraint_residual = best->residual;
  result.stationarity_residual = best->stationarity;
  std::vector<double> v(dim);
  whiten.to_velocity(best->z, v);
  for (std::size_t r = 0; r < d; ++r) {
    result.paths.emplace_back(grid, std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(r * m),
                                                        v.begin() + static_cast<std::ptrdiff_t>((r + 1) * m)));
  }
  return result;
}

ExpansionCoefficients expansion_coefficients(const IndexModel& model) {
  const auto sa = index_skew(model);
  ExpansionCoefficients out;
  out.sigma0_sq = sa.spot_variance;
  out.skew_term = sa.variance_skew * sa.spot_variance;
  out.second = 1.0 / out.sigma0_sq;
  out.third = -3.0 * out.skew_term / std::pow(out.sigma0_sq, 3);
  return out;
}

std::vector<EnergyRow> smile_from_energy(const IndexModel& model, std::span<const double> xs,
                                         const PathGrid& grid, const SolverOptions& options,
                                         unsigned threads) {
  const double sigma0_sq = index_spot_variance(model);
  std::vector<EnergyRow> rows(xs.size());
  parallel_chunks(xs.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = solve_energy(model, xs[i], grid, options);
      auto& row = rows[i];
      row.x = xs[i];
      row.lambda = r.lambda_value;
      row.multiplier = r.multiplier;
      row.converged = r.converged;
      row.multistart_spread = r.multistart_spread;
      row.implied_variance = xs[i] == 0.0 ? sigma0_sq : xs[i] * xs[i] / (2.0 * r.lambda_value);
    }
  });
  return rows;
}

void write_energy_csv(std::ostream& out, std::span<const EnergyRow> rows) {
  out << "x,lambda,multiplier,implied_variance,converged,multistart_spread\n";
  for (const auto& r : rows) {
    out << csv_number(r.x) << ',' << csv_number(r.lambda) << ',' << csv_number(r.multiplier) << ','
        << csv_number(r.implied_variance) << ',' << (r.converged ? 1 : 0) << ','
        << csv_number(r.multistart_spread) << '\n';
  }
}

}  // namespace iskew
