#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "fracdrift/cov_matrix.hpp"
#include "fracdrift/gamma_field.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/quadrature.hpp"
#include "fracdrift/report.hpp"
#include "fracdrift/rng.hpp"
#include "fracdrift/thick_set.hpp"
#include "fracdrift/word_coding.hpp"

namespace fracdrift {

// (log i)_+, with (log 0)_+ = (log 1)_+ = 0.
double log_plus(std::size_t i);

// ((1 - r)^H - (1 - (1 - r)^{2H})^{1/2}) H^{-1/2}.
double lambda_r(const HurstContext& ctx, double r);

// ---------------------------------------------------------------------------------------
// Law of the iterated logarithm along r^i.

struct LilConfig {
  HurstContext ctx;
  double r = 0.5;
  std::vector<std::size_t> i_max_ladder{10, 20, 40};
  ThickSet thick_set;          // defaults to all of N on [0, max i_max]
  std::size_t n_paths = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double band_below = 0.35;    // band [-H^{-1/2} - band_below, -H^{-1/2} + band_above]
  double band_above = 0.6;
  double familywise_alpha = 1e-3;
  QuadratureSpec quad;

  std::size_t i_max() const;
  void validate() const;
};

// Normalised unit-kernel Levy fBm at v = r^i, X_i = Y_{r^i} / r^{Hi} for i = 0..i_max, split as
// X_i = Xt_i + Xp_i with Xt_i from the driving noise on [r^{i+1}, r^i) (independent across i,
// variance (1-r)^{2H}/(2H)) and Xp_i from the noise on [0, r^{i+1}). Sampled jointly from the
// exact covariance of (Xt, X).
class LevyScaleSampler {
 public:
  LevyScaleSampler(const HurstContext& ctx, double r, std::size_t i_max, const QuadratureSpec& spec = {});

  struct Sample {
    std::vector<double> x, x_tilde, x_prime;
  };

  std::size_t size() const noexcept { return m_; }
  double tilde_variance() const noexcept { return tilde_var_; }
  const CovMatrix& covariance() const noexcept { return *cov_; }
  void sample(RngStream& rng, Sample& out) const;

 private:
  std::size_t m_;
  double tilde_var_ = 0.0;
  std::unique_ptr<CovMatrix> cov_;  // order (Xt_0..Xt_imax, X_0..X_imax)
};

// Per path, M = min over i in I ∩ [2, i_max] of X_i / (log i)^{1/2}, for each i_max of the ladder
// (nested, from the same path); medians and their trend against -H^{-1/2}.
ExperimentReport lil_statistic(const LilConfig& cfg);

// ---------------------------------------------------------------------------------------
// Arbitrage events A_n = {#{i < n : Gamma_i >= alpha H^{-1/2} (log i)_+^{1/2}} >= p n}.

struct ArbitrageConfig {
  HurstContext ctx;
  double r = 0.1;
  double alpha = 0.5;
  double p = 0.5;
  std::vector<std::size_t> n_ladder{1, 4, 8, 16, 32};
  std::size_t n_paths = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::size_t dual_max_n = 8;     // the antithetic second estimator covers n <= dual_max_n
  std::optional<double> alpha_prime, p_prime, r_tilde;
  double familywise_alpha = 1e-3;
  QuadratureSpec quad;

  std::size_t n_max() const;
  GammaConfig gamma() const;
  void validate() const;
};

// Covariance matrix of (Gamma_0, ..., Gamma_{n-1}), Toeplitz through the lag form.
Eigen::MatrixXd gamma_covariance_matrix(const GammaConfig& cfg, std::size_t n);

ExperimentReport a_n_probability(const ArbitrageConfig& cfg);

// ceil((e^{H / (alpha - alpha')^2} + 1) / (p - p')).
std::uint64_t n_threshold(double H, double alpha, double alpha_prime, double p, double p_prime);

struct ProductTailBound {
  double sigma2 = 0.0;
  double eps = 0.0;
  double phi_j = 0.0, phi_k = 0.0;
  double c_l = 0.0;                       // alpha H^{-1/2} / (phi_k^{1/2} sigma)
  std::vector<std::size_t> indices;       // I, ascending
  std::vector<double> log_factors;        // log Pr(N(0,1) >= c_l (log i)_+^{1/2}), i in I
  std::vector<double> log_factor_bounds;  // -c_l^2 (log i)_+ / 2
  double log_product = 0.0;               // exact log Pr(Pi_i >= tau_i for all i in I)
  double log_gaussian_bound = 0.0;        // sum of log_factor_bounds
  double log_ordered_bound = 0.0;         // -c_l^2/2 log (|I| - 1)_+!
  double log_factorial_bound = 0.0;       // -c_l^2/2 log (ceil(p n) - 1)_+!
  double log_density_ratio = 0.0;         // (n/2) log(phi_j phi_k)
  double log_bound = 0.0;                 // log_density_ratio + log_factorial_bound
  bool chain_ok = false;                  // every step of the chain holds numerically
};

// Evaluates the chain bounding Pr(Gamma_i >= alpha H^{-1/2} (log i)_+^{1/2} for all i in I).
// eps and sigma^2 are measured from gamma_field up to lag n - 1 unless given.
ProductTailBound product_tail_bound(const ArbitrageConfig& cfg, std::size_t n, const std::vector<std::size_t>& I,
                                    std::optional<double> eps = std::nullopt,
                                    std::optional<double> sigma2 = std::nullopt);

// ceil(r_tilde^{-n}), exactly when 1 / r_tilde is an integer.
BigInt ceil_inverse_power(double r_tilde, std::size_t n);

// Assembled bound ceil(r_tilde^{-n}) (P(A'_n) + n c_b exp(-c_a (r / r_tilde)^{(2H^1) n})) per n,
// given estimates (or bounds) of P(A'_n).
ExperimentReport union_bound_ledger(const ArbitrageConfig& cfg, const std::vector<std::size_t>& ns,
                                    const std::vector<double>& p_prime_values);

}  // namespace fracdrift
