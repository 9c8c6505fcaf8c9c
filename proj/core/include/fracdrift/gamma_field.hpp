#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fracdrift/hurst.hpp"
#include "fracdrift/quadrature.hpp"
#include "fracdrift/report.hpp"

namespace fracdrift {

// Gamma_i = r^{-Hi} int_{-inf}^0 ((r^i - s)^eta - (-s)^eta) dW_s (unit moving-average kernel)
// and Gamma-hat_i(t), the same functional of the past seen from time t.
struct GammaConfig {
  HurstContext ctx;
  double r = 0.1;
  std::size_t n = 1;
  QuadratureSpec quad;

  void validate() const;
};

// Cov(Gamma_i, Gamma_j) through the lag form r^{-dH} int_0^inf xi_eta(x, r^d) xi_eta(x, 1) dx.
double gamma_cov(const GammaConfig& cfg, std::size_t i, std::size_t j);
// The same covariance through the two-index form r^{-(i+j)H} int_0^inf xi_eta(x, r^i) xi_eta(x, r^j) dx.
double gamma_cov_direct(const GammaConfig& cfg, std::size_t i, std::size_t j);
// Var(Gamma) = int_0^inf xi_eta(x, 1)^2 dx.
double gamma_variance(const GammaConfig& cfg);

struct GammaCovariance {
  double sigma2 = 0.0;
  std::vector<double> cov;     // Cov(Gamma_0, Gamma_d), d = 0..d_max
  std::vector<double> rho;     // cov / sigma2
  std::vector<double> scaled;  // |cov| r^{-(1/2 - |eta|) d}
  double cf_fit = 0.0;         // max of scaled
  double eps = 0.0;            // max_{d >= 1} |rho_d|^{1/d}
  double tail_slope = 0.0;     // least-squares slope of log(scaled) over the upper half of lags
  double tail_change = 0.0;    // |scaled_dmax - scaled_{dmax/2}| / cf_fit
  bool bounded = false;
};

GammaCovariance decay_bound_check(const GammaConfig& cfg, std::size_t d_max);

// decay_bound_check as a report: passes when the scaled covariance is finite and its tail
// slope is at most slope_tol (no increasing trend).
ExperimentReport gamma_decay_report(const GammaConfig& cfg, std::size_t d_max = 30, double slope_tol = 1e-3);

// Var(Gamma-hat_t - Gamma-hat_0) = int_0^t xi_eta(x,1)^2 dx + int_0^inf (xi_eta(y+t,1) - xi_eta(y,1))^2 dy.
double gammahat_modulus(const GammaConfig& cfg, double t);
// Autocovariance of the stationary process Gamma-hat_0: sigma^2 - modulus(tau) / 2.
double gammahat_autocov(const GammaConfig& cfg, double tau);

// sup over t = 2^{-k}, k = 0..k_max, of modulus(t) / t^{2H^1}.
double c_e(const GammaConfig& cfg, int k_max = 20);

struct RegGamhatConstants {
  double theta = 0.0;  // H ^ 1/2
  double c_e = 0.0;
  double c_c = 0.0;
  double c_d = 0.0;
  double c_a = 0.0;    // c_c / c_e
  double c_b = 0.0;    // max(c_d, e^{c_a})
};

RegGamhatConstants reg_gamhat_constants(const GammaConfig& cfg);
// c_b exp(-c_a (r^i / T)^{2H^1}).
double reg_gamhat_bound(const RegGamhatConstants& k, double r, std::size_t i, double T);
double reg_gamhat_bound(const GammaConfig& cfg, std::size_t i, double T);

// Kernels of Gamma_i (s < 0) and Gamma-hat_0(t) (s < t) in the oBm representation.
std::function<double(double)> gamma_kernel(const GammaConfig& cfg, std::size_t i);
std::function<double(double)> gammahat_kernel(const GammaConfig& cfg, double t);

struct GammaMonteCarloConfig {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::size_t d_max = 5;          // lags checked against gamma_cov
  double modulus_t = 0.25;        // lag checked against gammahat_modulus
};

// Monte Carlo of (Gamma_0..Gamma_dmax, Gamma-hat_t - Gamma-hat_0) from sampled oBm pasts.
ExperimentReport gamma_monte_carlo(const GammaConfig& cfg, const GammaMonteCarloConfig& mc);

struct SupMonteCarloConfig {
  std::size_t n_paths = 10000;
  std::size_t n_grid = 512;       // grid points on [0, T]
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

// Empirical Pr(sup_{t <= T} |Gamma-hat_0(t) - Gamma_0| >= 1) on a grid, sampled exactly from
// the stationary autocovariance, against reg_gamhat_bound(0, T).
ExperimentReport reg_gamhat_monte_carlo(const GammaConfig& cfg, double T, const SupMonteCarloConfig& mc);

}  // namespace fracdrift
