#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "fracdrift/errors.hpp"
#include "fracdrift/prediction.hpp"

namespace fracdrift {

using detail::xi_signed;

QuadResult drift_kernel_eval(const DriftKernelSpec& spec, double u, double v) {
  if (!(u < 0.0) || !(v > 0.0) || !std::isfinite(u) || !std::isfinite(v))
    throw DomainError("drift_kernel: need u < 0 < v");
  const double eta = spec.ctx.eta;
  if (eta == 0.0) return {};
  const double a = -u;

  // s < u: closed form of -xi_{eta-1}(a, v) int_a^inf ((x+a)^{-eta-1} - x^{-eta-1}) dx.
  const double part1 = -xi_signed(eta - 1.0, a, v) * std::pow(a, -eta) * std::expm1(-eta * std::log(2.0)) / eta;

  // u < s < 0, y = -s in (0, a). Two algebraically equal forms, each free of
  // cancellation near its own endpoint.
  const double xa = xi_signed(eta - 1.0, a, v);
  auto near_zero = [eta, a, v, xa](double y) {
    const double bracket = xi_signed(eta - 1.0, a + v, -y) - xi_signed(eta - 1.0, a, -y);  // xi(a-y,v) - xi(a,v)
    return -std::pow(y, -eta - 1.0) * bracket + std::pow(a, -eta - 1.0) * xi_signed(eta - 1.0, a - y, v) -
           xa * std::pow(a + y, -eta - 1.0);
  };
  auto near_a = [eta, a, v, xa](double y) {
    // (a^{-eta-1} - y^{-eta-1}) xi_{eta-1}(a-y, v) + xi_{eta-1}(a, v) (y^{-eta-1} - (a+y)^{-eta-1})
    const double d1 = -xi_signed(-eta - 1.0, a, y - a);
    return d1 * xi_signed(eta - 1.0, a - y, v) + xa * (-xi_signed(-eta - 1.0, y, a));
  };
  const int extra = static_cast<int>(std::ceil(std::max(0.0, std::log2(a / v))));
  QuadResult part2 = quad::graded(near_zero, 0.0, 0.5 * a, Endpoint::left, spec.quad);
  part2 += quad::graded(near_a, 0.5 * a, a, Endpoint::right, spec.quad, extra);

  const double last = v * std::pow(v + a, eta - 1.0) * std::pow(a, -eta - 1.0);
  const double pre = eta * spec.ctx.cH;
  QuadResult out;
  out.value = pre * (eta * (part1 + part2.value) - last);
  out.error = std::abs(pre * eta) * part2.error;
  return out;
}

double drift_kernel(const DriftKernelSpec& spec, double u, double v) {
  const QuadResult r = drift_kernel_eval(spec, u, v);
  if (!std::isfinite(r.value)) throw AccuracyError("drift_kernel: non-finite value", r.error);
  if (r.error > 1e-6 * std::abs(r.value) + 1e-300)
    throw AccuracyError("drift_kernel: inner quadrature did not converge", r.error);
  return r.value;
}

namespace {

constexpr double kLogMin = -12.0 * 2.302585092994046;  // ln 1e-12
constexpr double kLogMax = 12.0 * 2.302585092994046;

double envelope(double eta, double ax) { return std::pow(ax, -eta - 1.0) * std::pow(1.0 + ax, eta - 1.0); }

}  // namespace

struct DriftKernelTable::Impl {
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
  double g_lo, g_hi;
  Impl(std::vector<double>& g, double step)
      : spline(g.data(), g.size(), kLogMin, step), g_lo(g.front()), g_hi(g.back()) {}
};

DriftKernelTable::DriftKernelTable(const DriftKernelSpec& spec, int points_per_decade) : spec_(spec) {
  spec.quad.validate();
  if (points_per_decade < 4) throw DomainError("DriftKernelTable: need at least 4 points per decade");
  const std::size_t n = static_cast<std::size_t>(24 * points_per_decade) + 1;
  const double step = (kLogMax - kLogMin) / static_cast<double>(n - 1);
  std::vector<double> g(n, 0.0);
  if (spec.ctx.eta != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ax = std::exp(kLogMin + step * static_cast<double>(i));
      const QuadResult r = drift_kernel_eval(spec, -ax, 1.0);
      const double e = envelope(spec.ctx.eta, ax);
      g[i] = r.value / e;
      max_err_ = std::max(max_err_, r.error / std::max(std::abs(r.value), 1e-300));
    }
  }
  impl_ = std::make_unique<Impl>(g, step);
}

DriftKernelTable::~DriftKernelTable() = default;
DriftKernelTable::DriftKernelTable(DriftKernelTable&&) noexcept = default;

double DriftKernelTable::operator()(double x) const {
  const double eta = spec_.ctx.eta;
  if (eta == 0.0) return 0.0;
  const double ax = -x;
  const double l = std::log(ax);
  double g;
  if (l <= kLogMin) g = impl_->g_lo;
  else if (l >= kLogMax) g = impl_->g_hi;
  else g = impl_->spline(l);
  return g * envelope(eta, ax);
}

double DriftKernelTable::tail_integral(double y) const {
  if (!(y > 0.0)) throw DomainError("DriftKernelTable::tail_integral: y must be positive");
  if (spec_.ctx.eta == 0.0) return 0.0;
  auto f = [this](double x) { return (*this)(-x); };
  return quad::half_line(f, y, y, false, spec_.quad).value;
}

}  // namespace fracdrift
