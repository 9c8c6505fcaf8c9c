#include "fracdrift/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracdrift/errors.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/hat_weights.hpp"

namespace fracdrift {

using detail::xi_signed;

std::vector<double> PastWeights::apply(std::span<const double> past) const {
  if (past.size() != n_nodes) throw DomainError("PastWeights: past has wrong number of nodes");
  std::vector<double> out(rows.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = 0.0;
    const std::vector<double>& w = rows[i];
    for (std::size_t k = 0; k < n_nodes; ++k) s += w[k] * past[k];
    out[i] = s;
  }
  return out;
}

namespace {

void check_v_grid(const std::vector<double>& v) {
  if (v.empty()) throw DomainError("v_grid must be non-empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) throw DomainError("v_grid entries must be finite and nonnegative");
    if (i > 0 && !(v[i] > v[i - 1])) throw DomainError("v_grid must be strictly ascending");
  }
}

void check_past(const GridPath& past, double dt, std::size_t n_nodes, const char* who) {
  past.validate();
  if (past.size() != n_nodes || std::abs(past.dt - dt) > 1e-12 * dt)
    throw DomainError(std::string(who) + ": past grid does not match the operator grid");
  if (std::abs(past.back_time()) > 1e-9 * dt) throw DomainError(std::string(who) + ": past must end at t = 0");
  if (past.values.back() != 0.0) throw DomainError(std::string(who) + ": past must vanish at t = 0");
}

// Hat weights of int_{-U}^0 f(u) X_u du for X piecewise linear with X_0 = 0; f may be
// singular at u = 0.
template <class F>
std::vector<double> past_hat_weights(F&& f, double dt, std::size_t n_nodes, const QuadratureSpec& spec) {
  std::vector<double> w(n_nodes, 0.0);
  const std::size_t z0 = n_nodes - 1;
  const double t0 = -static_cast<double>(z0) * dt;
  for (std::size_t c = 0; c < z0; ++c) {
    const double a = t0 + static_cast<double>(c) * dt;
    const double b = c + 1 == z0 ? 0.0 : t0 + static_cast<double>(c + 1) * dt;
    const bool touch = c + 1 == z0;
    const CellMoments m =
        cell_moments(f, a, b, touch ? Endpoint::right : Endpoint::none, static_cast<double>(z0 - c - 1), spec);
    w[c] += m.left;
    w[c + 1] += m.right;
  }
  w[z0] = 0.0;
  return w;
}

}  // namespace

DriftOperator::DriftOperator(std::shared_ptr<const DriftKernelTable> table, double dt, std::size_t n_nodes,
                             std::vector<double> v_grid)
    : table_(std::move(table)) {
  check_v_grid(v_grid);
  if (n_nodes < 2 || !(dt > 0.0)) throw DomainError("DriftOperator: need at least two past nodes and dt > 0");
  const double U = static_cast<double>(n_nodes - 1) * dt;
  if (U < table_->spec().quad.u_max * (1.0 - 1e-12))
    throw DomainError("drift_apply: past horizon " + format_double(U) + " is shorter than u_max " +
                      format_double(table_->spec().quad.u_max));
  w_.dt = dt;
  w_.n_nodes = n_nodes;
  w_.v_grid = v_grid;
  for (double v : v_grid) {
    if (v == 0.0) {
      w_.rows.emplace_back(n_nodes, 0.0);
      continue;
    }
    const DriftKernelTable& k = *table_;
    auto f = [&k, v](double u) { return k(u / v) / v; };
    std::vector<double> row = past_hat_weights(f, dt, n_nodes, table_->spec().quad);
    row[0] += k.tail_integral(U / v);
    w_.rows.push_back(std::move(row));
  }
}

Trajectory DriftOperator::apply(const GridPath& past) const {
  check_past(past, w_.dt, w_.n_nodes, "drift_apply");
  return {w_.v_grid, w_.apply(past.values)};
}

Trajectory drift_apply(const DriftKernelSpec& spec, const GridPath& past, const std::vector<double>& v_grid) {
  past.validate();
  auto table = std::make_shared<const DriftKernelTable>(spec);
  return DriftOperator(table, past.dt, past.size(), v_grid).apply(past);
}

ObmDriftOperator::ObmDriftOperator(const HurstContext& ctx, double dt, std::size_t n_nodes, std::vector<double> v_grid,
                                   const QuadratureSpec& spec) {
  check_v_grid(v_grid);
  spec.validate();
  if (n_nodes < 2 || !(dt > 0.0)) throw DomainError("ObmDriftOperator: need at least two past nodes and dt > 0");
  const double U = static_cast<double>(n_nodes - 1) * dt;
  if (U < spec.u_max * (1.0 - 1e-12))
    throw DomainError("drift_from_obm: past horizon " + format_double(U) + " is shorter than u_max " +
                      format_double(spec.u_max));
  w_.dt = dt;
  w_.n_nodes = n_nodes;
  w_.v_grid = v_grid;
  const double eta = ctx.eta, c1 = ctx.c1;
  for (double v : v_grid) {
    if (v == 0.0 || eta == 0.0) {
      w_.rows.emplace_back(n_nodes, 0.0);
      continue;
    }
    auto f = [eta, c1, v](double s) { return eta * c1 * xi_signed(eta - 1.0, -s, v); };
    std::vector<double> row = past_hat_weights(f, dt, n_nodes, spec);
    // W constant before -U: eta c1 W_{-U} int_U^inf xi_{eta-1}(x, v) dx = -c1 W_{-U} xi_eta(U, v).
    row[0] -= c1 * xi_signed(eta, U, v);
    w_.rows.push_back(std::move(row));
  }
}

Trajectory ObmDriftOperator::apply(const GridPath& w_past) const {
  check_past(w_past, w_.dt, w_.n_nodes, "drift_from_obm");
  return {w_.v_grid, w_.apply(w_past.values)};
}

Trajectory drift_from_obm(const HurstContext& ctx, const GridPath& w_past, const std::vector<double>& v_grid,
                          const QuadratureSpec& spec) {
  w_past.validate();
  return ObmDriftOperator(ctx, w_past.dt, w_past.size(), v_grid, spec).apply(w_past);
}

std::vector<std::size_t> regression_nodes(std::size_t n_nodes, std::size_t max_points) {
  if (max_points < 16) throw DomainError("drift_regression: max_points must be at least 16");
  const std::size_t m = n_nodes - 1;  // the node at 0 carries no information
  std::vector<std::size_t> lag;       // distance from t = 0 in grid steps
  if (m <= max_points) {
    for (std::size_t j = 1; j <= m; ++j) lag.push_back(j);
  } else {
    const std::size_t dense = max_points / 2, block = std::max<std::size_t>(max_points / 16, 1);
    std::size_t j = 0, stride = 1, left = dense;
    while (lag.size() + 1 < max_points && j + stride <= m) {
      j += stride;
      lag.push_back(j);
      if (--left == 0) {
        stride *= 2;
        left = block;
      }
    }
    if (lag.back() != m) lag.push_back(m);
  }
  std::vector<std::size_t> idx;
  for (auto it = lag.rbegin(); it != lag.rend(); ++it) idx.push_back(m - *it);
  return idx;
}

RegressionOperator::RegressionOperator(const HurstContext& ctx, double dt, std::size_t n_nodes,
                                       std::vector<double> v_grid, std::size_t max_points) {
  check_v_grid(v_grid);
  if (n_nodes < 2 || !(dt > 0.0)) throw DomainError("drift_regression: need at least two past nodes and dt > 0");
  if (max_points > 2048) throw DomainError("drift_regression: at most 2048 conditioning points");
  nodes_ = regression_nodes(n_nodes, max_points);
  const std::size_t m = nodes_.size();
  const double t0 = -static_cast<double>(n_nodes - 1) * dt;
  std::vector<double> t(m);
  for (std::size_t i = 0; i < m; ++i) t[i] = t0 + static_cast<double>(nodes_[i]) * dt;
  Eigen::MatrixXd S(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) S(i, j) = S(j, i) = fbm_cov(ctx, t[i], t[j]);
  const CovMatrix cov(std::move(S));
  w_.dt = dt;
  w_.n_nodes = n_nodes;
  w_.v_grid = v_grid;
  for (double v : v_grid) {
    Eigen::VectorXd c(m);
    for (std::size_t i = 0; i < m; ++i) c(i) = fbm_cov(ctx, v, t[i]);
    const Eigen::VectorXd a = cov.solve(c);
    if (!a.allFinite()) throw NumericError("drift_regression: singular covariance after jitter");
    std::vector<double> row(n_nodes, 0.0);
    for (std::size_t i = 0; i < m; ++i) row[nodes_[i]] = a(i);
    w_.rows.push_back(std::move(row));
    resvar_.push_back(fbm_cov(ctx, v, v) - c.dot(a));
  }
}

Trajectory RegressionOperator::apply(const GridPath& past) const {
  check_past(past, w_.dt, w_.n_nodes, "drift_regression");
  return {w_.v_grid, w_.apply(past.values)};
}

Trajectory drift_regression(const HurstContext& ctx, const GridPath& past, const std::vector<double>& v_grid) {
  past.validate();
  return RegressionOperator(ctx, past.dt, past.size(), v_grid).apply(past);
}

InversionOperator::InversionOperator(const HurstContext& ctx, double t0, double dt, std::size_t n_nodes,
                                     std::vector<double> t_grid, const QuadratureSpec& spec)
    : t0_(t0), dt_(dt), n_nodes_(n_nodes), t_grid_(std::move(t_grid)) {
  spec.validate();
  if (n_nodes < 2 || !(dt > 0.0)) throw DomainError("pipiras_taqqu_invert: need at least two nodes and dt > 0");
  if (t0 > -spec.u_max * (1.0 - 1e-12)) throw DomainError("pipiras_taqqu_invert: path must cover [-u_max, max t]");
  GridPath layout;
  layout.t0 = t0;
  layout.dt = dt;
  layout.values.assign(n_nodes, 0.0);
  const std::size_t z0 = layout.index_of(0.0);
  const double eta = ctx.eta, U = -t0;
  const double scale = ctx.cH / ctx.c1;
  auto node = [&](std::size_t k) { return k == z0 ? 0.0 : t0 + static_cast<double>(k) * dt; };

  for (double t : t_grid_) {
    const std::size_t j = layout.index_of(t);
    std::vector<double> w(n_nodes, 0.0);
    if (j == z0) {
      rows_.push_back(std::move(w));
      continue;
    }
    if (eta == 0.0) {
      w[j] = scale;
      rows_.push_back(std::move(w));
      continue;
    }
    if (j < z0) {
      // eta int_{-inf}^t xi_{-eta-1}(t-s, -t) (Z_s - Z_t) ds + eta int_t^0 (-s)^{-eta-1} Z_s ds + (-t)^{-eta} Z_t
      const double tt = node(j);
      auto f1 = [eta, tt](double s) { return -eta * xi_signed(-eta - 1.0, -s, tt); };
      for (std::size_t c = 0; c < j; ++c) {
        const bool touch = c + 1 == j;
        const CellMoments m = cell_moments(f1, node(c), node(c + 1), touch ? Endpoint::right : Endpoint::none,
                                           static_cast<double>(j - c - 1), spec);
        w[c] += m.left;
        w[j] -= m.left;
        if (!touch) {
          w[c + 1] += m.right;
          w[j] -= m.right;
        }
      }
      auto f2 = [eta](double s) { return eta * std::pow(-s, -eta - 1.0); };
      for (std::size_t c = j; c < z0; ++c) {
        const bool touch = c + 1 == z0;
        const CellMoments m = cell_moments(f2, node(c), node(c + 1), touch ? Endpoint::right : Endpoint::none,
                                           static_cast<double>(z0 - c - 1), spec);
        w[c] += m.left;
        w[c + 1] += m.right;
      }
      w[j] += std::pow(-tt, -eta);
      // Z constant before -U: eta (Z_{-U} - Z_t) int_{-inf}^{-U} xi_{-eta-1}(t-s, -t) ds.
      const double tail = -xi_signed(-eta, U, tt);
      w[0] += tail;
      w[j] -= tail;
    } else {
      // t^{-eta} Z_t - eta int_{-inf}^0 xi_{-eta-1}(-s, t) Z_s ds - eta int_0^t (t-s)^{-eta-1} (Z_s - Z_t) ds
      const double tt = node(j);
      auto f1 = [eta, tt](double s) { return -eta * xi_signed(-eta - 1.0, -s, tt); };
      for (std::size_t c = 0; c < z0; ++c) {
        const bool touch = c + 1 == z0;
        const CellMoments m = cell_moments(f1, node(c), node(c + 1), touch ? Endpoint::right : Endpoint::none,
                                           static_cast<double>(z0 - c - 1), spec);
        w[c] += m.left;
        w[c + 1] += m.right;
      }
      auto f2 = [eta, tt](double s) { return -eta * std::pow(tt - s, -eta - 1.0); };
      for (std::size_t c = z0; c < j; ++c) {
        const bool touch = c + 1 == j;
        const double b = touch ? tt : node(c + 1);
        const CellMoments m = cell_moments(f2, node(c), b, touch ? Endpoint::right : Endpoint::none,
                                           static_cast<double>(j - c - 1), spec);
        w[c] += m.left;
        w[j] -= m.left;
        if (!touch) {
          w[c + 1] += m.right;
          w[j] -= m.right;
        }
      }
      w[j] += std::pow(tt, -eta);
      w[0] -= xi_signed(-eta, U, tt);
    }
    w[z0] = 0.0;
    for (double& x : w) x *= scale;
    rows_.push_back(std::move(w));
  }
}

Trajectory InversionOperator::apply(const GridPath& z) const {
  z.validate();
  if (z.size() != n_nodes_ || std::abs(z.dt - dt_) > 1e-12 * dt_ || std::abs(z.t0 - t0_) > 1e-9 * dt_)
    throw DomainError("pipiras_taqqu_invert: path grid does not match the operator grid");
  Trajectory out;
  out.times = t_grid_;
  for (const auto& row : rows_) {
    double s = 0.0;
    for (std::size_t k = 0; k < n_nodes_; ++k) s += row[k] * z.values[k];
    out.values.push_back(s);
  }
  return out;
}

Trajectory pipiras_taqqu_invert(const HurstContext& ctx, const GridPath& z_path, const std::vector<double>& t_grid,
                                const QuadratureSpec& spec) {
  z_path.validate();
  const std::size_t z0 = z_path.index_of(0.0);
  if (z_path.values[z0] != 0.0) throw DomainError("pipiras_taqqu_invert: Z must vanish at t = 0");
  return InversionOperator(ctx, z_path.t0, z_path.dt, z_path.size(), t_grid, spec).apply(z_path);
}

}  // namespace fracdrift
