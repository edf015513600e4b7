// Serial reference paths against their OpenMP counterparts. Thread count 1
// selects the serial path; 0 uses every OpenMP thread.

#include <benchmark/benchmark.h>

#include "tsgrasp/analysis.hpp"
#include "tsgrasp/harness.hpp"

using namespace tsgrasp;

namespace {

ExperimentConfig bench_config() {
  auto c = ExperimentConfig::desk_defaults();
  c.environment_count = 8;
  c.runs_per_arm_set = 4;
  c.master_seed = 1;
  c.policies = {{PolicyKind::Oracle, 0.0},
                {PolicyKind::ThompsonSeeded, 5.0},
                {PolicyKind::ThompsonUniform, 0.0},
                {PolicyKind::Greedy, 0.0}};
  return c;
}

void BM_RunExperiment(benchmark::State& state) {
  const auto config = bench_config();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(config, threads));
  }
  state.SetItemsProcessed(state.iterations() * 4 * 8 * 4);  // runs
}
BENCHMARK(BM_RunExperiment)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_MonteCarloSerial(benchmark::State& state) {
  const CoverageQuery q{0.1, 0.5, 25};
  for (auto _ : state) {
    benchmark::DoNotOptimize(coverage_monte_carlo_serial(q, state.range(0), 3));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloSerial)->Arg(200000)->Unit(benchmark::kMillisecond);

void BM_MonteCarloParallel(benchmark::State& state) {
  const CoverageQuery q{0.1, 0.5, 25};
  for (auto _ : state) {
    benchmark::DoNotOptimize(coverage_monte_carlo(q, state.range(0), 3));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloParallel)->Arg(200000)->Unit(benchmark::kMillisecond);

void BM_RegretStudy(benchmark::State& state) {
  const auto model = PoseModel::single(GroundTruth({0.1, 0.5, 0.7, 0.3, 0.2, 0.6}));
  const std::vector<std::vector<double>> prior{{0.2, 0.4, 0.6, 0.3, 0.1, 0.5}};
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        regret_study(model, {PolicyKind::ThompsonSeeded, 5.0}, prior, 2000, 16, 7, threads));
  }
}
BENCHMARK(BM_RegretStudy)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_CoverageDoubleSum(benchmark::State& state) {
  const CoverageQuery q{0.05, 0.5, state.range(0)};
  for (auto _ : state) benchmark::DoNotOptimize(coverage_double_sum(q));
}
BENCHMARK(BM_CoverageDoubleSum)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
