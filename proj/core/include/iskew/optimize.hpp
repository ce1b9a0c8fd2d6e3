#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace iskew::opt {

/// Returns f(x) and writes the gradient into `grad` (same size as x).
using GradientFunction = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  std::size_t memory = 12;
  std::size_t max_iterations = 2000;
  double gradient_tolerance = 1e-10;  // Euclidean norm
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with a strong-Wolfe line search.
LbfgsResult minimize_lbfgs(const GradientFunction& f, std::vector<double> x0,
                           const LbfgsOptions& options = {});

struct AugmentedLagrangianOptions {
  double constraint_tolerance = 1e-8;
  double stationarity_tolerance = 1e-6;
  std::size_t max_outer_iterations = 200;
  double penalty_growth = 10.0;
  double max_penalty = 1e12;
  LbfgsOptions inner;
};

struct AugmentedLagrangianResult {
  std::vector<double> x;
  double multiplier = 0.0;
  double objective = 0.0;
  double constraint = 0.0;     // c(x), signed
  double stationarity = 0.0;   // |grad f - multiplier * grad c|
  std::size_t outer_iterations = 0;
  bool converged = false;
};

/// min f(x) subject to c(x) = 0 for one scalar equality constraint, using
///
///   L(x) = f(x) - lambda c(x) + (mu / 2) c(x)^2
///
/// with quasi-Newton inner solves and first-order multiplier updates
/// lambda <- lambda - mu c(x). At a solution grad f = lambda grad c.
AugmentedLagrangianResult minimize_augmented_lagrangian(const GradientFunction& objective,
                                                        const GradientFunction& constraint,
                                                        std::vector<double> x0, double lambda0,
                                                        const AugmentedLagrangianOptions& options = {});

}  // namespace iskew::opt
