#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fracdrift/hurst.hpp"
#include "fracdrift/report.hpp"

namespace fracdrift {

// Empirical covariance of sampled fBm and Levy fBm at t = dt, ..., n_points dt against
// fbm_cov and levy_cov, entrywise in standard errors.
struct CovarianceFidelityConfig {
  std::size_t n_points = 64;
  double dt = 1.0 / 64.0;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double familywise_alpha = 1e-3;

  void validate() const;
};

ExperimentReport covariance_fidelity(const HurstContext& ctx, const CovarianceFidelityConfig& cfg);

// Kernel drift of the fBm past against the oBm-side drift on jointly sampled (W, Z) pairs.
// Pairs are co-simulated on the fine grid 1/fine and subsampled to each level 1/levels[k].
struct DriftEquivalenceConfig {
  double u_max = 50.0;
  std::size_t fine = 8192;
  std::vector<std::size_t> levels{256, 1024, 2048};  // first = default grid, last = refined grid
  std::vector<double> v_grid{0.25, 0.5, 0.75, 1.0};
  std::size_t n_pairs = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double default_limit = 0.05;
  double refined_limit = 0.02;

  void validate() const;
};

ExperimentReport drift_equivalence(const HurstContext& ctx, const DriftEquivalenceConfig& cfg);

// W -> Z -> W: Z built exactly from a piecewise-linear oBm path on [-u_max, horizon], then
// inverted on the coarser grids and compared with W at t_grid.
struct RoundTripConfig {
  double u_max = 50.0;
  double horizon = 2.0;
  std::size_t fine = 4096;
  std::vector<std::size_t> levels{256, 1024};        // first = default grid
  std::vector<double> t_grid{-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
  std::size_t n_pairs = 50;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double limit = 0.05;
  double exact_tol = 1e-10;                          // used when H = 1/2

  void validate() const;
};

ExperimentReport inversion_round_trip(const HurstContext& ctx, const RoundTripConfig& cfg);

}  // namespace fracdrift
