#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fracdrift/rng.hpp"

namespace fracdrift {

struct NoiseGrid {
  double rel_width = 0.05;  // cell width / distance to the nearest focal point
  double min_width = 1e-9;  // width of the cells adjacent to a focal point
  double horizon = 1e10;    // partition covers [-horizon, t_end]
};

// Jointly Gaussian vector (int f_j(s) dW_s)_j for deterministic kernels on
// (-horizon, t_end], realised as X_j = sum_c avg_c(f_j) (W(c_hi) - W(c_lo)) on a partition
// that is geometrically refined toward the focal points (where kernels are singular or
// change scale). This is the L2 projection of each kernel onto cell-wise constants.
class NoiseFunctionals {
 public:
  NoiseFunctionals(std::vector<std::function<double(double)>> kernels, double t_end, std::vector<double> focal,
                   const NoiseGrid& grid = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(avg_.rows()); }
  std::size_t n_cells() const noexcept { return widths_.size(); }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }

  void sample(RngStream& rng, std::span<double> out) const;
  // Exact covariance of the discretised vector.
  Eigen::MatrixXd covariance() const;

 private:
  std::vector<double> breaks_;
  std::vector<double> widths_;
  std::vector<double> sd_;
  Eigen::MatrixXd avg_;  // kernels x cells, column-major: one column per cell
};

}  // namespace fracdrift
