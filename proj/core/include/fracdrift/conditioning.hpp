#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fracdrift/hurst.hpp"
#include "fracdrift/prediction.hpp"
#include "fracdrift/report.hpp"

namespace fracdrift {

struct ConditioningConfig {
  double dt = 1.0 / 64.0;
  double u_max = 64.0;                          // past window [-u_max, 0]
  std::vector<double> v_grid{0.25, 0.5, 0.75, 1.0};  // future times, grid nodes
  std::size_t n_paths = 20000;
  std::size_t n_probes = 32;                    // past nodes tested for cross-covariance
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool omit_drift = false;                      // negative control: residual = Z_v
  double familywise_alpha = 1e-3;

  void validate() const;
};

// Exact second-order structure of R_v = Z_v - sum_k w_v[k] Z_{t_k} for fBm Z, given the
// weights of a linear past functional.
struct ResidualMoments {
  Eigen::MatrixXd cov;    // Cov(R_v, R_v')
  Eigen::MatrixXd cross;  // Cov(R_v, Z_{t_k}) for the probe nodes (rows v, columns probes)
};

ResidualMoments exact_residual_moments(const HurstContext& ctx, const PastWeights& w,
                                       const std::vector<std::size_t>& probes);

// Probe nodes at roughly geometric lags from t = 0 (indices into the past grid).
std::vector<std::size_t> probe_nodes(std::size_t n_nodes, std::size_t n_probes);

// Monte Carlo check that Z_v - (D Z_past)_v is independent of the past and distributed
// as Levy fBm. The discretization budget is |exact residual covariance - levy_cov|,
// always computed with the drift weights, also under omit_drift.
ExperimentReport validate_conditioning(const HurstContext& ctx, const ConditioningConfig& cfg);

}  // namespace fracdrift
