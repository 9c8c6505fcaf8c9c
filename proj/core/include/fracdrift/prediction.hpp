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
#include "fracdrift/xi.hpp"

namespace fracdrift {

struct DriftKernelSpec {
  HurstContext ctx;
  QuadratureSpec quad;
};

// K(u, v) for u < 0 < v by direct quadrature of the inner s-integral.
QuadResult drift_kernel_eval(const DriftKernelSpec& spec, double u, double v);
double drift_kernel(const DriftKernelSpec& spec, double u, double v);

// k(x) = K(x, 1) tabulated on a logarithmic grid of x in [-1e12, -1e-12], stored as
// k(x) / (|x|^{-eta-1} (1 + |x|)^{eta-1}) and interpolated with a cubic B-spline in log|x|.
// K(u, v) = k(u / v) / v by scaling.
class DriftKernelTable {
 public:
  explicit DriftKernelTable(const DriftKernelSpec& spec, int points_per_decade = 48);
  ~DriftKernelTable();
  DriftKernelTable(DriftKernelTable&&) noexcept;

  double operator()(double x) const;         // k(x), x < 0
  double kernel(double u, double v) const { return (*this)(u / v) / v; }
  double tail_integral(double y) const;      // int_{-inf}^{-y} k(x) dx, y > 0
  double max_node_error() const noexcept { return max_err_; }
  const DriftKernelSpec& spec() const noexcept { return spec_; }

 private:
  struct Impl;
  DriftKernelSpec spec_;
  std::unique_ptr<Impl> impl_;
  double max_err_ = 0.0;
};

// Weights of a linear functional of a past path on a uniform grid ending at 0, one row
// per v: value_v = sum_k w_v[k] X_k.
struct PastWeights {
  double dt = 0.0;
  std::size_t n_nodes = 0;  // nodes t0 = -(n_nodes-1) dt, ..., 0
  std::vector<double> v_grid;
  std::vector<std::vector<double>> rows;

  std::vector<double> apply(std::span<const double> past) const;
};

// (DX)_v = int_{-inf}^0 K(u, v) X_u du for piecewise-linear X, constant before the
// window start. Weights are computed once and applied to many paths.
class DriftOperator {
 public:
  DriftOperator(std::shared_ptr<const DriftKernelTable> table, double dt, std::size_t n_nodes,
                std::vector<double> v_grid);
  const PastWeights& weights() const noexcept { return w_; }
  Trajectory apply(const GridPath& past) const;

 private:
  std::shared_ptr<const DriftKernelTable> table_;
  PastWeights w_;
};

Trajectory drift_apply(const DriftKernelSpec& spec, const GridPath& past, const std::vector<double>& v_grid);

// c1 int_{-inf}^0 ((v-s)^eta - (-s)^eta) dW_s
//   = eta c1 int_{-inf}^0 xi_{eta-1}(-s, v) W_s ds, from the driving oBm past.
class ObmDriftOperator {
 public:
  ObmDriftOperator(const HurstContext& ctx, double dt, std::size_t n_nodes, std::vector<double> v_grid,
                   const QuadratureSpec& spec = {});
  const PastWeights& weights() const noexcept { return w_; }
  Trajectory apply(const GridPath& w_past) const;

 private:
  PastWeights w_;
};

Trajectory drift_from_obm(const HurstContext& ctx, const GridPath& w_past, const std::vector<double>& v_grid,
                          const QuadratureSpec& spec = {});

// Indices of the past nodes a regression conditions on: all of them when there are at most
// max_points (excluding t = 0), otherwise max_points / 2 nearest nodes followed by blocks
// of geometrically growing stride, always ending with the oldest node.
std::vector<std::size_t> regression_nodes(std::size_t n_nodes, std::size_t max_points = 2048);

// E[Z_v | Z on the selected past nodes] by Gaussian regression (at most 2048 points).
class RegressionOperator {
 public:
  RegressionOperator(const HurstContext& ctx, double dt, std::size_t n_nodes, std::vector<double> v_grid,
                     std::size_t max_points = 2048);
  const PastWeights& weights() const noexcept { return w_; }
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }
  // Var(Z_v) - Cov(v, past)^T Cov(past)^{-1} Cov(v, past).
  const std::vector<double>& residual_variance() const noexcept { return resvar_; }
  Trajectory apply(const GridPath& past) const;

 private:
  PastWeights w_;
  std::vector<std::size_t> nodes_;
  std::vector<double> resvar_;
};

Trajectory drift_regression(const HurstContext& ctx, const GridPath& past, const std::vector<double>& v_grid);

// W on t_grid from a two-sided fBm path by the inversion formula (piecewise-linear Z,
// constant before the window start). Each t must be a node of the z grid.
class InversionOperator {
 public:
  InversionOperator(const HurstContext& ctx, double t0, double dt, std::size_t n_nodes, std::vector<double> t_grid,
                    const QuadratureSpec& spec = {});
  Trajectory apply(const GridPath& z) const;
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

 private:
  double t0_, dt_;
  std::size_t n_nodes_;
  std::vector<double> t_grid_;
  std::vector<std::vector<double>> rows_;
};

Trajectory pipiras_taqqu_invert(const HurstContext& ctx, const GridPath& z_path, const std::vector<double>& t_grid,
                                const QuadratureSpec& spec = {});

}  // namespace fracdrift
