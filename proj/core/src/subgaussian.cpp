#include "fracdrift/subgaussian.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <string>

#include "fracdrift/errors.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/rng.hpp"
#include "fracdrift/stats.hpp"

namespace fracdrift {

namespace {

// Compact form for check and estimate names.
std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

SubGaussianConstants subgaussian_constants(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("subgaussian_constants: theta must lie in (0, 1]");
  const double g = -std::expm1(-0.5 * theta * std::log(2.0));  // 1 - 2^{-theta/2}
  SubGaussianConstants k;
  k.theta = theta;
  k.c_c = 0.5 * g * g;
  k.c_o = 2.0 / (g * std::sqrt(theta));
  k.c_d = std::max(4.0, std::exp(k.c_c * k.c_o * k.c_o));
  return k;
}

double subgaussian_bound(const SubGaussianConstants& k, double x) {
  if (!(x >= 0.0)) throw DomainError("subgaussian_bound: x must be nonnegative");
  return k.c_d * std::exp(-k.c_c * x * x);
}

double chaining_weight(double theta, int i) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("chaining_weight: theta must lie in (0, 1]");
  if (i < 0) throw DomainError("chaining_weight: negative level");
  return -std::expm1(-0.5 * theta * std::log(2.0)) * std::exp(-0.5 * theta * i * std::log(2.0));
}

void SubGaussianMcConfig::validate() const {
  subgaussian_constants(theta);
  if (process == SupProcess::brownian && theta > 0.5)
    throw DomainError("subgaussian_monte_carlo: Brownian motion only satisfies theta <= 1/2");
  if (process == SupProcess::fbm) {
    make_context(hurst);
    if (hurst < theta) throw DomainError("subgaussian_monte_carlo: fBm needs H >= theta");
  }
  if (x_values.empty()) throw DomainError("subgaussian_monte_carlo: x_values must not be empty");
  for (double x : x_values)
    if (!(x >= 0.0)) throw DomainError("subgaussian_monte_carlo: x must be nonnegative");
  if (n_paths < 1 || n_grid < 1) throw DomainError("subgaussian_monte_carlo: need paths and grid points");
}

SupProcess sup_process_from_string(const std::string& s) {
  if (s == "brownian") return SupProcess::brownian;
  if (s == "fbm") return SupProcess::fbm;
  if (s == "linear") return SupProcess::linear;
  throw DomainError("unknown process '" + s + "' (brownian | fbm | linear)");
}

std::string to_string(SupProcess p) {
  switch (p) {
    case SupProcess::brownian: return "brownian";
    case SupProcess::fbm: return "fbm";
    case SupProcess::linear: return "linear";
  }
  return {};
}

namespace {

struct HitAcc {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> hits;
  explicit HitAcc(std::size_t k = 0) : hits(k, 0) {}
  void merge(const HitAcc& o) {
    n += o.n;
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += o.hits[i];
  }
};

}  // namespace

ExperimentReport subgaussian_monte_carlo(const SubGaussianMcConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const double dt = 1.0 / static_cast<double>(cfg.n_grid);
  const double H = cfg.process == SupProcess::fbm ? cfg.hurst : 0.5;
  const FbmSampler sampler(make_context(H), cfg.n_grid, dt);
  const RngStream root(cfg.seed, 0x73676175ULL);
  const std::size_t K = cfg.x_values.size();

  const HitAcc acc = chunked_reduce(
      cfg.n_paths, 256, cfg.threads, [K] { return HitAcc(K); },
      [&](HitAcc& a, std::size_t path) {
        RngStream rng = root.substream(path);
        double sup;
        if (cfg.process == SupProcess::linear) {
          sup = std::abs(rng.normal());
        } else {
          const GridPath p = sampler.sample(rng);
          sup = 0.0;
          for (double v : p.values) sup = std::max(sup, std::abs(v));
        }
        ++a.n;
        for (std::size_t k = 0; k < K; ++k)
          if (sup >= cfg.x_values[k]) ++a.hits[k];
      });

  const SubGaussianConstants k = subgaussian_constants(cfg.theta);
  ExperimentReport rep;
  rep.name = "subgaussian_monte_carlo";
  rep.seed = cfg.seed;
  rep.config = {{"theta", cfg.theta},       {"process", to_string(cfg.process)}, {"hurst", H},
                {"x_values", cfg.x_values}, {"n_paths", cfg.n_paths},           {"n_grid", cfg.n_grid}};
  rep.add_estimate("c_c", k.c_c, k.c_c, k.c_c, 0);
  rep.add_estimate("c_d", k.c_d, k.c_d, k.c_d, 0);
  const double n = static_cast<double>(acc.n);
  for (std::size_t i = 0; i < K; ++i) {
    const std::string x = short_number(cfg.x_values[i]);
    const double p = static_cast<double>(acc.hits[i]) / n;
    const double se = std::max(std::sqrt(p * (1.0 - p) / n), 1.0 / n);
    const double bound = subgaussian_bound(k, cfg.x_values[i]);
    const Interval ci = wilson_interval(acc.hits[i], acc.n);
    rep.add_estimate("sup_exceed_probability_x" + x, p, ci.low, ci.high, acc.n);
    rep.add_estimate("bound_x" + x, bound, bound, bound, 0);
    rep.add_check("bound_not_violated_x" + x, (p - bound) / se, 3.0, "(empirical - bound) / SE");
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

}  // namespace fracdrift
