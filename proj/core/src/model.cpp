#include "iskew/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <numeric>
#include <sstream>

namespace iskew {

namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-12;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

Eigen::MatrixXd to_eigen(const CorrelationMatrix& corr) {
  const auto n = static_cast<Eigen::Index>(corr.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = corr(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(std::vector<std::vector<double>> rows) : n_(rows.size()) {
  if (n_ == 0) throw std::invalid_argument("correlation matrix must not be empty");
  entries_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw std::invalid_argument("correlation matrix must be square");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t n) { return equicorrelated(n, 0.0); }

CorrelationMatrix CorrelationMatrix::equicorrelated(std::size_t n, double rho) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, rho));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
  return CorrelationMatrix(std::move(rows));
}

InvalidModel::InvalidModel(std::vector<std::string> violations)
    : std::invalid_argument("invalid model: " + join(violations)),
      violations_(std::move(violations)) {}

std::vector<std::string> validate(const IndexModel& model) {
  std::vector<std::string> out;
  const std::size_t n = model.size();
  if (n == 0) {
    out.emplace_back("model has no components");
    return out;
  }

  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = model.components[i];
    const std::string tag = "component " + std::to_string(i) + ": ";
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) out.push_back(tag + "weight must be positive");
    if (!(c.vol.sigma > 0.0) || !std::isfinite(c.vol.sigma)) out.push_back(tag + "sigma must be positive");
    if (!std::isfinite(c.vol.eta)) out.push_back(tag + "eta must be finite");
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > kWeightSumTolerance) {
    out.push_back("weights sum to " + format_number(weight_sum));
  }

  const auto& corr = model.correlation;
  const std::size_t expected = model.drivers();
  if (corr.size() != expected) {
    out.push_back("correlation dimension " + std::to_string(corr.size()) + " does not match " +
                  (model.mode == FactorMode::TwoFactor ? "two_factor" : "one_factor") +
                  " mode (expected " + std::to_string(expected) + ")");
  }

  bool shape_ok = true;
  for (std::size_t i = 0; i < corr.size(); ++i) {
    if (corr(i, i) != 1.0) {
      out.push_back("correlation diagonal entry " + std::to_string(i) + " is not 1");
      shape_ok = false;
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!std::isfinite(corr(i, j)) || std::abs(corr(i, j) - corr(j, i)) > kSymmetryTolerance) {
        out.push_back("correlation not symmetric at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
        shape_ok = false;
      } else if (std::abs(corr(i, j)) > 1.0) {
        out.push_back("correlation entry (" + std::to_string(i) + "," + std::to_string(j) +
                      ") outside [-1, 1]");
        shape_ok = false;
      }
    }
  }
  if (shape_ok) {
    try {
      (void)cholesky(corr);
    } catch (const std::invalid_argument& e) {
      out.emplace_back(e.what());
    }
  }
  return out;
}

void require_valid(const IndexModel& model) {
  auto violations = validate(model);
  if (!violations.empty()) throw InvalidModel(std::move(violations));
}

LowerTriangular::LowerTriangular(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) throw std::invalid_argument("LowerTriangular: bad entry count");
}

void LowerTriangular::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += entries_[i * n_ + j] * x[j];
    y[i] = s;
  }
}

void LowerTriangular::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  for (std::size_t j = 0; j < n_; ++j) {
    double s = 0.0;
    for (std::size_t i = j; i < n_; ++i) s += entries_[i * n_ + j] * x[i];
    y[j] = s;
  }
}

std::vector<double> LowerTriangular::solve(std::span<const double> b) const {
  if (b.size() != n_) throw std::invalid_argument("dimension mismatch in triangular solve");
  std::vector<double> y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= entries_[i * n_ + j] * y[j];
    y[i] = s / entries_[i * n_ + i];
  }
  return y;
}

LowerTriangular cholesky(const CorrelationMatrix& corr) {
  const Eigen::MatrixXd m = to_eigen(corr);
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("correlation not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const std::size_t n = corr.size();
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      entries[i * n + j] = l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    // LLT accepts tiny positive pivots of numerically singular matrices.
    if (!(entries[i * n + i] > 1e-7)) throw std::invalid_argument("correlation not positive definite");
  }
  return LowerTriangular(n, std::move(entries));
}

double rho_inverse_quadratic(const CorrelationMatrix& corr, std::span<const double> u,
                             std::span<const double> v) {
  if (u.size() != corr.size() || v.size() != corr.size()) {
    throw std::invalid_argument("rho_inverse_quadratic: dimension mismatch");
  }
  const auto l = cholesky(corr);
  const auto a = l.solve(u);
  const auto b = l.solve(v);
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace iskew
