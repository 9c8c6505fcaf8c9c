#include <memory>

#include <benchmark/benchmark.h>

#include "fracdrift/fbm.hpp"
#include "fracdrift/prediction.hpp"

using namespace fracdrift;

static void BM_DriftKernelEval(benchmark::State& state) {
  const DriftKernelSpec spec{make_context(0.75), {}};
  double u = -0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift_kernel(spec, u, 1.0));
    u = u < -100.0 ? -0.1 : u * 1.37;
  }
}
BENCHMARK(BM_DriftKernelEval);

static void BM_DriftKernelTable(benchmark::State& state) {
  const DriftKernelSpec spec{make_context(0.75), {}};
  for (auto _ : state) benchmark::DoNotOptimize(DriftKernelTable(spec));
}
BENCHMARK(BM_DriftKernelTable)->Unit(benchmark::kMillisecond);

static void BM_DriftOperatorApply(benchmark::State& state) {
  DriftKernelSpec spec{make_context(0.75), {}};
  spec.quad.u_max = 50.0;
  const double dt = 1.0 / static_cast<double>(state.range(0));
  const auto n = static_cast<std::size_t>(50.0 / dt) + 1;
  const DriftOperator op(std::make_shared<DriftKernelTable>(spec), dt, n, {0.25, 0.5, 0.75, 1.0});
  RngStream rng(2, 1);
  const GridPath past = sample_bilateral_fbm(spec.ctx, n - 1, 1, dt, rng).past;
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(past));
}
BENCHMARK(BM_DriftOperatorApply)->Arg(256)->Arg(1024);

static void BM_RegressionOperatorBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(RegressionOperator(make_context(0.75), 1.0 / 64, n, {0.5, 1.0}));
}
BENCHMARK(BM_RegressionOperatorBuild)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
