#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fracdrift/rng.hpp"

namespace fracdrift {

// Symmetric positive-semidefinite matrix with a Cholesky factor computed at construction.
// When the plain factorization fails, diagonal jitter 1e-12 * trace / dim is added
// (repeatedly multiplied by 10, at most 6 times). Immutable afterwards.
class CovMatrix {
 public:
  explicit CovMatrix(Eigen::MatrixXd entries);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const Eigen::MatrixXd& chol() const noexcept { return chol_; }
  double jitter() const noexcept { return jitter_; }

  // ||L L^T - entries||_F / ||entries||_F.
  double reconstruction_error() const;

  // x = L g with g i.i.d. standard normal drawn from rng.
  void sample(RngStream& rng, std::span<double> out) const;
  // x = L g for a given g.
  void apply_factor(std::span<const double> g, std::span<double> out) const;
  // Solves entries * x = b using the factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::MatrixXd entries_;
  Eigen::MatrixXd chol_;
  std::vector<double> packed_;  // rows of the factor, row i at offset i (i + 1) / 2
  double jitter_ = 0.0;

  void pack();
};

}  // namespace fracdrift
