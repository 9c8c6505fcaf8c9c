#include <vector>

#include <benchmark/benchmark.h>

#include "fracdrift/cov_matrix.hpp"
#include "fracdrift/experiments.hpp"
#include "fracdrift/gamma_field.hpp"

using namespace fracdrift;

static GammaConfig config() {
  GammaConfig g;
  g.ctx = make_context(0.75);
  g.r = 0.1;
  return g;
}

static void BM_GammaCov(benchmark::State& state) {
  const GammaConfig g = config();
  std::size_t d = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_cov(g, 0, d));
    d = (d + 1) % 32;
  }
}
BENCHMARK(BM_GammaCov);

static void BM_GammaVectorSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CovMatrix c(gamma_covariance_matrix(config(), n));
  std::vector<double> out(n);
  RngStream rng(3, 1);
  for (auto _ : state) {
    c.sample(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GammaVectorSample)->Arg(8)->Arg(32)->Arg(64);

static void BM_GammahatModulus(benchmark::State& state) {
  const GammaConfig g = config();
  for (auto _ : state) benchmark::DoNotOptimize(gammahat_modulus(g, 0.25));
}
BENCHMARK(BM_GammahatModulus);

BENCHMARK_MAIN();
