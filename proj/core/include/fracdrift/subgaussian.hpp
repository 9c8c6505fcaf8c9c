#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fracdrift/report.hpp"

namespace fracdrift {

// Constants of the sub-Gaussian sup bound Pr(sup_[0,1] |X| >= x) <= c_d exp(-c_c x^2) for
// centred Gaussian X with X_0 = 0 and Var(X_t - X_s) <= |t - s|^{2 theta}.
// c_c = (1 - 2^{-theta/2})^2 / 2, c_o = 2 / ((1 - 2^{-theta/2}) theta^{1/2}),
// c_d = max(4, exp(c_c c_o^2)) = max(4, exp(2 / theta)).
struct SubGaussianConstants {
  double theta = 1.0;
  double c_c = 0.0;
  double c_d = 0.0;
  double c_o = 0.0;
};

SubGaussianConstants subgaussian_constants(double theta);
double subgaussian_bound(const SubGaussianConstants& k, double x);

// Chaining weights gamma_i = (1 - 2^{-theta/2}) 2^{-i theta/2}; they sum to 1 over i >= 0.
double chaining_weight(double theta, int i);

enum class SupProcess { brownian, fbm, linear };

// Test processes on [0, 1] with X_0 = 0: Brownian motion (theta <= 1/2), fBm with H >= theta,
// and X_t = g t with g ~ N(0, 1) (any theta).
struct SubGaussianMcConfig {
  double theta = 0.5;
  SupProcess process = SupProcess::brownian;
  double hurst = 0.75;                   // fbm only
  std::vector<double> x_values{1.0, 2.0, 3.0};
  std::size_t n_paths = 10000;
  std::size_t n_grid = 1024;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  void validate() const;
};

SupProcess sup_process_from_string(const std::string& s);
std::string to_string(SupProcess p);

// Empirical Pr(max over the grid of |X| >= x) against subgaussian_bound, one check per x
// ((empirical - bound) / SE <= 3).
ExperimentReport subgaussian_monte_carlo(const SubGaussianMcConfig& cfg);

}  // namespace fracdrift
