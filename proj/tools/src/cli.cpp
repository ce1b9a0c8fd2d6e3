#include "iskew_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "iskew/asymptotics.hpp"
#include "iskew/csv.hpp"
#include "iskew/energy.hpp"
#include "iskew/model_json.hpp"
#include "iskew/montecarlo.hpp"
#include "iskew/parallel.hpp"
#include "iskew/version.hpp"

namespace iskew::cli {

namespace {

struct Settings {
  std::string model_path;
  std::string out_path;
  double x_min = -0.1;
  double x_max = 0.1;
  std::size_t x_count = 11;
  double x = 0.1;
  std::size_t grid_steps = 128;
  std::vector<double> epsilons;
  std::size_t paths = 200000;
  std::size_t steps = 256;
  std::uint64_t seed = 20240901;
  bool no_antithetic = false;
  std::size_t min_exceedances = 200;
  std::size_t max_paths = 20000000;
  SolverOptions solver;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> x_grid(const Settings& s) {
  if (s.x_count < 1) throw InputError("--x-count must be at least 1");
  if (!(s.x_min <= s.x_max)) throw InputError("--x-min must not exceed --x-max");
  std::vector<double> xs(s.x_count);
  if (s.x_count == 1) {
    xs[0] = s.x_min;
    return xs;
  }
  const double step = (s.x_max - s.x_min) / double(s.x_count - 1);
  for (std::size_t i = 0; i < s.x_count; ++i) xs[i] = s.x_min + step * double(i);
  xs.back() = s.x_max;
  // Snap the symmetric midpoint to an exact zero so the x = 0 branch applies.
  for (auto& x : xs) {
    if (std::abs(x) < 1e-12 * std::max(1.0, s.x_max - s.x_min)) x = 0.0;
  }
  return xs;
}

IndexModel load_valid(const Settings& s) {
  if (s.model_path.empty()) throw InputError("--model is required");
  IndexModel model = load_model(s.model_path);
  require_valid(model);
  return model;
}

McConfig mc_config(const Settings& s, double epsilon) {
  McConfig cfg;
  cfg.epsilon = epsilon;
  cfg.n_steps = s.steps;
  cfg.n_paths = s.paths;
  cfg.seed = s.seed;
  cfg.antithetic = !s.no_antithetic;
  if (const auto bad = validate(cfg); !bad.empty()) throw InputError(bad.front());
  return cfg;
}

PathGrid solver_grid(const Settings& s) {
  if (s.grid_steps < 1) throw InputError("--grid-steps must be positive");
  return PathGrid(s.grid_steps);
}

SolverOptions solver_options(const Settings& s) {
  SolverOptions o = s.solver;
  o.seed = s.seed;
  return o;
}

void cmd_asymptotics(const Settings& s, std::ostream& out) {
  const auto model = load_valid(s);
  const auto sa = index_skew(model);
  const auto ec = expansion_coefficients(model);
  out << "quantity,value\n";
  out << "sigma_I_sq," << csv_number(sa.spot_variance) << '\n';
  out << "S_I," << csv_number(sa.variance_skew) << '\n';
  out << "vol_skew," << csv_number(sa.vol_skew) << '\n';
  out << "lambda_second," << csv_number(ec.second) << '\n';
  out << "lambda_third," << csv_number(ec.third) << '\n';
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << "single_asset_skew_" << i << ',' << csv_number(single_asset_skew(model.components[i])) << '\n';
  }
}

void cmd_energy(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto model = load_valid(s);
  const auto xs = x_grid(s);
  const auto rows = smile_from_energy(model, xs, solver_grid(s), solver_options(s), threads_from_environment());
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const EnergyRow& r) { return !r.converged; });
  if (failed == static_cast<std::ptrdiff_t>(rows.size())) throw ComputationError("solver failed on every row");
  for (const auto& r : rows) {
    if (!r.converged) err << "warning: solver did not converge at x=" << csv_number(r.x) << '\n';
  }
  write_energy_csv(out, rows);
}

void cmd_mostlikely(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto model = load_valid(s);
  const auto first_order = most_likely_configuration(model, s.x);
  const PathGrid grid = solver_grid(s);
  const auto sol = solve_energy(model, s.x, grid, solver_options(s));
  if (!sol.converged) err << "warning: solver did not converge at x=" << csv_number(s.x) << '\n';
  std::vector<double> v;
  for (const auto& p : sol.paths) v.insert(v.end(), p.velocity().begin(), p.velocity().end());
  const auto moves = IndexFunctional(model, grid).component_values(v);
  out << "component,weight,x_star,solver_log_move,difference\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << i << ',' << csv_number(model.components[i].weight) << ',' << csv_number(first_order.xstar[i]) << ','
        << csv_number(moves[i]) << ',' << csv_number(moves[i] - first_order.xstar[i]) << '\n';
  }
}

void cmd_mc(const Settings& s, std::ostream& out) {
  const auto model = load_valid(s);
  const auto xs = x_grid(s);
  const double eps = s.epsilons.empty() ? 0.1 : s.epsilons.front();
  const auto rows = mc_smile(model, mc_config(s, eps), xs, threads_from_environment());
  write_mc_smile_csv(out, rows);
}

void cmd_rate(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto model = load_valid(s);
  std::vector<double> eps = s.epsilons.empty() ? std::vector<double>{0.4, 0.3, 0.2} : s.epsilons;
  for (double e : eps) mc_config(s, e);
  const auto sol = solve_energy(model, s.x, solver_grid(s), solver_options(s));
  if (!sol.converged) throw ComputationError("energy solver did not converge at x=" + csv_number(s.x));
  RateCheckOptions opts;
  opts.min_exceedances = s.min_exceedances;
  opts.max_paths = std::max(s.max_paths, s.paths);
  const auto rows =
      rate_check(model, s.x, sol.lambda_value, eps, mc_config(s, eps.front()), opts, threads_from_environment());
  for (const auto& r : rows) {
    if (r.flagged) err << "warning: rare event, increase paths (epsilon=" << csv_number(r.epsilon) << ")\n";
  }
  write_rate_csv(out, rows);
}

void add_model(CLI::App* cmd, Settings& s) {
  cmd->add_option("--model", s.model_path, "Model JSON file")->required();
  cmd->add_option("--out", s.out_path, "Output CSV path (default: standard output)");
  cmd->add_option("--seed", s.seed, "Random seed");
}

void add_x_grid(CLI::App* cmd, Settings& s) {
  cmd->add_option("--x-min", s.x_min, "Smallest log-moneyness");
  cmd->add_option("--x-max", s.x_max, "Largest log-moneyness");
  cmd->add_option("--x-count", s.x_count, "Number of grid points");
}

void add_solver(CLI::App* cmd, Settings& s) {
  cmd->add_option("--grid-steps", s.grid_steps, "Path discretization steps");
  cmd->add_option("--constraint-tol", s.solver.constraint_tolerance, "Constraint residual tolerance");
  cmd->add_option("--gradient-tol", s.solver.gradient_tolerance, "First-order residual tolerance");
  cmd->add_option("--max-outer", s.solver.max_outer_iterations, "Outer iteration cap");
  cmd->add_option("--extra-starts", s.solver.extra_starts, "Random restarts beyond the first-order start");
}

void add_mc(CLI::App* cmd, Settings& s) {
  cmd->add_option("--paths", s.paths, "Monte Carlo paths");
  cmd->add_option("--steps", s.steps, "Monte Carlo time steps");
  cmd->add_flag("--no-antithetic", s.no_antithetic, "Disable antithetic pairs");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Small-noise skew asymptotics, rate function and Monte Carlo for index options", "index-skew-lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* asym = app.add_subcommand("asymptotics", "Closed-form spot variance and skew");
  add_model(asym, s);

  auto* energy = app.add_subcommand("energy", "Rate function over an x grid");
  auto* smile = app.add_subcommand("smile", "Implied variance x^2 / (2 Lambda(x)) over an x grid");
  for (auto* cmd : {energy, smile}) {
    add_model(cmd, s);
    add_x_grid(cmd, s);
    add_solver(cmd, s);
  }

  auto* likely = app.add_subcommand("mostlikely", "Most-likely component moves for an index move");
  add_model(likely, s);
  add_solver(likely, s);
  likely->add_option("--x", s.x, "Index log-move");

  auto* mc = app.add_subcommand("mc", "Monte Carlo smile");
  add_model(mc, s);
  add_x_grid(mc, s);
  add_mc(mc, s);
  mc->add_option("--epsilon", s.epsilons, "Noise scale")->expected(1);

  auto* rate = app.add_subcommand("rate", "Large-deviation rate check");
  add_model(rate, s);
  add_mc(rate, s);
  add_solver(rate, s);
  rate->add_option("--x", s.x, "Index log-move");
  rate->add_option("--epsilon", s.epsilons, "Noise scales, repeatable (default 0.4 0.3 0.2)");
  rate->add_option("--min-exceedances", s.min_exceedances, "Exceedances required per epsilon");
  rate->add_option("--max-paths", s.max_paths, "Path cap for the adaptive scaling");

  auto* check = app.add_subcommand("validate", "Check a model file");
  check->add_option("--model", s.model_path, "Model JSON file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (check->parsed()) {
      const IndexModel model = load_model(s.model_path);
      const auto violations = validate(model);
      if (!violations.empty()) {
        for (const auto& v : violations) err << "invalid model: " << v << '\n';
        return kInvalidInput;
      }
      out << "ok\n";
      return kOk;
    }

    // Render into a buffer so a failing command never leaves a partial file.
    std::ostringstream csv;
    write_provenance_line(csv, s.seed);
    if (asym->parsed()) cmd_asymptotics(s, csv);
    if (energy->parsed() || smile->parsed()) cmd_energy(s, csv, err);
    if (likely->parsed()) cmd_mostlikely(s, csv, err);
    if (mc->parsed()) cmd_mc(s, csv);
    if (rate->parsed()) cmd_rate(s, csv, err);

    if (s.out_path.empty()) {
      out << csv.str();
    } else {
      std::ofstream file(s.out_path, std::ios::binary);
      if (!file) throw InputError("cannot open output file " + s.out_path);
      file << csv.str();
      if (!file) throw ComputationError("failed writing " + s.out_path);
    }
    return kOk;
  } catch (const InvalidModel& e) {
    for (const auto& v : e.violations()) err << "invalid model: " << v << '\n';
    return kInvalidInput;
  } catch (const ModelParseError& e) {
    err << "invalid model file: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const InputError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << '\n';
    return kComputationFailed;
  }
}

}  // namespace iskew::cli
