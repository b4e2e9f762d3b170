// Compares the serial reference kernels with the OpenMP ones on the
// trial-batch workloads. Build and run:
//   cmake --build build --target allee_bench && ./build/benchmarks/allee_bench

#include <benchmark/benchmark.h>

#include "allee/montecarlo.hpp"

using namespace allee;

namespace {

RdsConfig bench_config() {
  RdsConfig cfg;
  cfg.f = MapSpec::sigmoid(2.5, 1.0, 3.0);
  cfg.g = MapSpec::sigmoid(3.0, 1.8, 3.0);
  cfg.p = 0.5;
  cfg.b = 3.0;
  return cfg;
}

RdsConfig bench_config_noisy() {
  RdsConfig cfg = bench_config();
  cfg.perturbation = PerturbationSpec{0.05};
  return cfg;
}

const OutcomeOptions& bench_opts() {
  static const OutcomeOptions opts = default_outcome_options(
      analyze_map(bench_config().f), analyze_map(bench_config().g), 3.0);
  return opts;
}

void BM_outcome_batch_serial(benchmark::State& state) {
  const RdsConfig cfg = bench_config();
  const std::size_t n = state.range(0);
  for (auto _ : state) {
    auto out = run_outcome_batch_serial(cfg, 0.66, 1000, 42, 0, n, bench_opts());
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * n * 1000);
}

void BM_outcome_batch_parallel(benchmark::State& state) {
  const RdsConfig cfg = bench_config();
  const std::size_t n = state.range(0);
  for (auto _ : state) {
    auto out = run_outcome_batch(cfg, 0.66, 1000, 42, 0, n, bench_opts());
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * n * 1000);
}

void BM_hitting_batch_serial(benchmark::State& state) {
  const RdsConfig cfg = bench_config_noisy();
  const std::size_t n = state.range(0);
  for (auto _ : state) {
    auto out = run_hitting_batch_serial(cfg, 2.0, 0.05, 2000, 42, 0, n);
    benchmark::DoNotOptimize(out);
  }
}

void BM_hitting_batch_parallel(benchmark::State& state) {
  const RdsConfig cfg = bench_config_noisy();
  const std::size_t n = state.range(0);
  for (auto _ : state) {
    auto out = run_hitting_batch(cfg, 2.0, 0.05, 2000, 42, 0, n);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(BM_outcome_batch_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_outcome_batch_parallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hitting_batch_serial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hitting_batch_parallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
