#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "iskew/asymptotics.hpp"
#include "iskew/energy.hpp"
#include "iskew/kernel.hpp"
#include "iskew/montecarlo.hpp"
#include "reference_models.hpp"

using namespace iskew;

static void BM_KernelLiftMidpoints(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const KernelWeights w{HurstParam(0.1), PathGrid(m)};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  std::vector<double> v(m), mid(m);
  for (auto& e : v) e = n01(rng);
  for (auto _ : state) {
    w.lift_midpoints(v, mid);
    benchmark::DoNotOptimize(mid.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelLiftMidpoints)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void BM_FunctionalGradient(benchmark::State& state) {
  const auto model = reference::three_asset();
  const IndexFunctional f(model, PathGrid(static_cast<std::size_t>(state.range(0))));
  std::vector<double> v(f.dimension(), 0.3), g(f.dimension());
  for (auto _ : state) benchmark::DoNotOptimize(f.value_and_gradient(v, g));
}
BENCHMARK(BM_FunctionalGradient)->Arg(128)->Arg(256);

static void BM_SolveEnergy(benchmark::State& state) {
  const auto model = reference::three_asset();
  const PathGrid grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_energy(model, 0.05, grid).lambda_value);
}
BENCHMARK(BM_SolveEnergy)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_IndexSkew(benchmark::State& state) {
  const auto model = reference::three_asset();
  for (auto _ : state) benchmark::DoNotOptimize(index_skew(model).variance_skew);
}
BENCHMARK(BM_IndexSkew);

static void BM_SimulateTerminal(benchmark::State& state) {
  const auto model = reference::three_asset();
  McConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_terminal(model, cfg, 1).log_index.data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_paths));
}
BENCHMARK(BM_SimulateTerminal)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
