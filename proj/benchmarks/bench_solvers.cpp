#include <benchmark/benchmark.h>

#include "ispmarket/equilibrium.hpp"
#include "ispmarket/queue_sim.hpp"
#include "ispmarket/sweep.hpp"

using namespace ispmarket;

static void BM_DemandConsumers(benchmark::State& state) {
  const ModelParams params;
  double d = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(demand_consumers(params, d, 0.75));
    d = d < 9.0 ? d + 1e-3 : 5.0;
  }
}
BENCHMARK(BM_DemandConsumers);

static void BM_SolveRegime(benchmark::State& state) {
  const auto regime = static_cast<Regime>(state.range(0));
  ModelParams params;
  params.lambda = 1.75;
  for (auto _ : state) benchmark::DoNotOptimize(solve(regime, params));
  state.SetLabel(std::string(to_string(regime)));
}
BENCHMARK(BM_SolveRegime)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_DefaultSweep(benchmark::State& state) {
  SweepSpec spec;
  spec.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec));
}
BENCHMARK(BM_DefaultSweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

static void BM_SimulateMm1(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_mm1(2.7, 3.0, static_cast<std::uint64_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateMm1)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
