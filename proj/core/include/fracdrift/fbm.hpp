#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fracdrift/cov_matrix.hpp"
#include "fracdrift/grid_path.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/quadrature.hpp"
#include "fracdrift/rng.hpp"

namespace fracdrift {

// Cov(Z_s, Z_t) = (|s|^2H + |t|^2H - |t-s|^2H) / 2.
double fbm_cov(const HurstContext& ctx, double s, double t);

// Cov(Y_s, Y_t) = c1^2 int_0^{s^t} (s-u)^eta (t-u)^eta du, for s, t >= 0.
double levy_cov(const HurstContext& ctx, double s, double t, const QuadratureSpec& spec = {});

// Autocovariance of fBm increments of step dt at lag k.
double fgn_autocov(const HurstContext& ctx, double dt, long k);

enum class SampleMethod { automatic, circulant, cholesky };

// Exact sampler for fBm on {0, dt, ..., n dt}. Circulant embedding of the increments
// when the embedding is nonnegative definite (eigenvalues >= -1e-9 max), dense Cholesky
// of the increment covariance otherwise.
class FbmSampler {
 public:
  FbmSampler(const HurstContext& ctx, std::size_t n, double dt, SampleMethod method = SampleMethod::automatic);
  ~FbmSampler();
  FbmSampler(FbmSampler&&) noexcept;

  SampleMethod method() const noexcept { return method_; }
  // Smallest embedding eigenvalue divided by the largest (1 when Cholesky was forced).
  double min_eigen_ratio() const noexcept { return min_ratio_; }

  void sample_increments(RngStream& rng, std::span<double> out) const;
  GridPath sample(RngStream& rng) const;

 private:
  struct Circulant;
  HurstContext ctx_;
  std::size_t n_;
  double dt_;
  SampleMethod method_;
  double min_ratio_ = 1.0;
  std::unique_ptr<Circulant> circ_;
  std::unique_ptr<CovMatrix> chol_;
};

GridPath sample_fbm(const HurstContext& ctx, std::size_t n, double dt, RngStream& rng,
                    SampleMethod method = SampleMethod::automatic);

// Exact sampler for Levy fBm on {0, dt, ..., n dt} via the dense covariance.
class LevyFbmSampler {
 public:
  LevyFbmSampler(const HurstContext& ctx, std::size_t n, double dt, const QuadratureSpec& spec = {});
  const CovMatrix& covariance() const noexcept { return cov_; }
  GridPath sample(RngStream& rng) const;

 private:
  std::size_t n_;
  double dt_;
  CovMatrix cov_;
};

// Covariance of Levy fBm at times dt, 2 dt, ..., n dt.
Eigen::MatrixXd levy_cov_matrix(const HurstContext& ctx, std::size_t n, double dt, const QuadratureSpec& spec = {});

GridPath sample_levy_fbm(const HurstContext& ctx, std::size_t n, double dt, RngStream& rng,
                         const QuadratureSpec& spec = {});

struct BilateralPath {
  GridPath past;    // on [-n_past dt, 0], value 0 at t = 0
  GridPath future;  // on [0, n_future dt], value 0 at t = 0
};

// Re-centres a one-sided fBm sample at node n_past (stationary increments).
BilateralPath split_bilateral(const GridPath& z, std::size_t n_past);

BilateralPath sample_bilateral_fbm(const HurstContext& ctx, std::size_t n_past, std::size_t n_future, double dt,
                                   RngStream& rng);

// Two-sided ordinary Brownian motion on [-n_past dt, n_future dt], pinned at 0 at t = 0.
GridPath sample_obm(std::size_t n_past, std::size_t n_future, double dt, RngStream& rng);

// Builds the fBm driven by a piecewise-linear oBm path W that is constant before its first
// node: Z_t = c1 int ((t-s)_+^eta - (-s)_+^eta) dW_s evaluated exactly at every node.
// W must have a node at t = 0 with value 0.
class Cosimulator {
 public:
  Cosimulator(const HurstContext& ctx, std::size_t n_nodes, double dt);
  ~Cosimulator();
  Cosimulator(Cosimulator&&) noexcept;

  GridPath fbm_from_obm(const GridPath& w) const;

 private:
  struct Impl;
  HurstContext ctx_;
  std::size_t n_nodes_;
  double dt_;
  std::unique_ptr<Impl> impl_;
};

struct PathFunctional {
  double value = 0.0;
  double truncation_bound = 0.0;  // size of a far-past contribution the window cannot see
  double node_error = 0.0;        // quadrature error estimate of the kernel weights
};

// c1^{-1} Z_t from the driving oBm path on [-U, t] via
//   t^eta W_t + eta int_{-inf}^t ((t-s)^{eta-1} - (-s)_+^{eta-1}) (W_s - 1{s>0} W_t) ds,
// with W piecewise linear and constant before the window start.
PathFunctional integrate_by_parts_eval(const HurstContext& ctx, const GridPath& w_path, double t,
                                       const QuadratureSpec& spec = {});

}  // namespace fracdrift
