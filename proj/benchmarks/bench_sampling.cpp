#include <benchmark/benchmark.h>

#include "fracdrift/fbm.hpp"

using namespace fracdrift;

static void BM_FbmCirculant(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FbmSampler s(make_context(0.75), n, 1.0 / n);
  RngStream rng(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FbmCirculant)->RangeMultiplier(4)->Range(64, 16384);

static void BM_FbmCholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FbmSampler s(make_context(0.75), n, 1.0 / n, SampleMethod::cholesky);
  RngStream rng(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FbmCholesky)->RangeMultiplier(4)->Range(64, 1024);

static void BM_LevySampler(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LevyFbmSampler s(make_context(0.25), n, 1.0 / n);
  RngStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(rng));
}
BENCHMARK(BM_LevySampler)->Arg(64)->Arg(256);

static void BM_Cosimulator(benchmark::State& state) {
  const std::size_t n_past = 50 * 256, n_future = 512;
  const double dt = 1.0 / 256;
  const Cosimulator cs(make_context(0.75), n_past + n_future + 1, dt);
  RngStream rng(1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(cs.fbm_from_obm(sample_obm(n_past, n_future, dt, rng)));
}
BENCHMARK(BM_Cosimulator)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
