#include <cmath>
#include <string>

#include "fft.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/hat_weights.hpp"
#include "fracdrift/xi.hpp"

namespace fracdrift {

struct Cosimulator::Impl {
  detail::RealConvolver conv;
  Impl(const std::vector<double>& kernel, std::size_t n) : conv(kernel, n) {}
};

Cosimulator::Cosimulator(const HurstContext& ctx, std::size_t n_nodes, double dt)
    : ctx_(ctx), n_nodes_(n_nodes), dt_(dt) {
  if (n_nodes < 2) throw DomainError("Cosimulator: need at least two nodes");
  if (!(dt > 0.0)) throw DomainError("Cosimulator: dt must be positive");
  // Cell c = [t_c, t_{c+1}] contributes dW_c h^eta D(k - c) / (eta + 1) to B(t_k), where
  // D(m) = m^{eta+1} - (m-1)^{eta+1}.
  const double e1 = ctx.eta + 1.0;
  std::vector<double> kernel(n_nodes, 0.0);
  for (std::size_t m = 1; m < n_nodes; ++m)
    kernel[m] = m == 1 ? 1.0 : -detail::xi_signed(e1, static_cast<double>(m), -1.0);
  impl_ = std::make_unique<Impl>(kernel, n_nodes);
}

Cosimulator::~Cosimulator() = default;
Cosimulator::Cosimulator(Cosimulator&&) noexcept = default;

GridPath Cosimulator::fbm_from_obm(const GridPath& w) const {
  if (w.size() != n_nodes_) throw DomainError("Cosimulator: path has " + std::to_string(w.size()) + " nodes, expected " + std::to_string(n_nodes_));
  if (std::abs(w.dt - dt_) > 1e-12 * dt_) throw DomainError("Cosimulator: grid step mismatch");
  const std::size_t z0 = w.index_of(0.0);
  if (w.values[z0] != 0.0) throw DomainError("Cosimulator: oBm path must be 0 at t = 0");
  std::vector<double> dW(n_nodes_ - 1);
  for (std::size_t c = 0; c + 1 < n_nodes_; ++c) dW[c] = w.values[c + 1] - w.values[c];
  std::vector<double> B(n_nodes_);
  impl_->conv.convolve(dW, B);
  const double scale = ctx_.c1 * std::pow(dt_, ctx_.eta) / (ctx_.eta + 1.0);
  GridPath z;
  z.t0 = w.t0;
  z.dt = w.dt;
  z.kind = PathKind::fBm;
  z.values.resize(n_nodes_);
  const double b0 = B[z0];
  for (std::size_t k = 0; k < n_nodes_; ++k) z.values[k] = scale * (B[k] - b0);
  z.values[z0] = 0.0;
  return z;
}

PathFunctional integrate_by_parts_eval(const HurstContext& ctx, const GridPath& w, double t,
                                       const QuadratureSpec& spec) {
  spec.validate();
  w.validate();
  if (!(t > 0.0)) throw DomainError("integrate_by_parts_eval: t must be positive");
  if (w.t0 > -spec.u_max * (1.0 - 1e-12))
    throw DomainError("integrate_by_parts_eval: path must cover [-u_max, t]");
  const std::size_t z0 = w.index_of(0.0);
  const std::size_t e = w.index_of(t);
  if (w.values[z0] != 0.0) throw DomainError("integrate_by_parts_eval: W must vanish at t = 0");
  const double eta = ctx.eta, U = -w.t0;

  PathFunctional out;
  double acc = std::pow(t, eta) * w.values[e];
  if (eta != 0.0) {
    // Past cells: kernel eta ((t-s)^{eta-1} - (-s)^{eta-1}), singular at s = 0 where W = 0.
    auto fpast = [eta, t](double s) { return eta * detail::xi_signed(eta - 1.0, -s, t); };
    for (std::size_t c = 0; c < z0; ++c) {
      const double a = w.time(c), b = c + 1 == z0 ? 0.0 : w.time(c + 1);
      const bool touch = c + 1 == z0;
      const CellMoments m = cell_moments(fpast, a, b, touch ? Endpoint::right : Endpoint::none,
                                         static_cast<double>(z0 - c - 1), spec);
      acc += m.left * w.values[c] + m.right * w.values[c + 1];
      out.node_error += m.error * std::abs(w.values[c]);
    }
    // Future cells: eta (t-s)^{eta-1} (W_s - W_t), singular at s = t.
    auto ffut = [eta, t](double s) { return eta * std::pow(t - s, eta - 1.0); };
    for (std::size_t c = z0; c < e; ++c) {
      const double a = c == z0 ? 0.0 : w.time(c), b = c + 1 == e ? t : w.time(c + 1);
      const bool touch = c + 1 == e;
      const CellMoments m = cell_moments(ffut, a, b, touch ? Endpoint::right : Endpoint::none,
                                         static_cast<double>(e - c - 1), spec);
      acc += m.left * (w.values[c] - w.values[e]);
      if (!touch) acc += m.right * (w.values[c + 1] - w.values[e]);
      out.node_error += m.error * std::abs(w.values[c] - w.values[e]);
    }
    // Flat extension before the window start.
    acc -= w.values[0] * detail::xi_signed(eta, U, t);
  }
  out.value = acc;
  // A stationary far past would add eta int_{-inf}^{-U} (...) (W_s - W_{-U}) ds, whose
  // standard deviation is at most |eta| (1 - eta) t U^{H-1} / (1 - H).
  out.truncation_bound = std::abs(eta) * (1.0 - eta) * t * std::pow(U, ctx.H - 1.0) / (1.0 - ctx.H);
  const double scale = std::pow(t, ctx.H) / ctx.c1;
  if (out.truncation_bound > spec.truncation_tol * scale)
    throw AccuracyError("integrate_by_parts_eval: horizon too short (truncation bound " +
                            std::to_string(out.truncation_bound / scale) + " relative)",
                        out.truncation_bound);
  return out;
}

}  // namespace fracdrift
