#include <cmath>
#include <memory>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "fracdrift/errors.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/prediction.hpp"

using namespace fracdrift;
using doctest::Approx;

namespace {

double xi_direct(double r, double a, double b) { return std::pow(a + b, r) - std::pow(a, r); }

// K(u, v) straight from its defining double-bracket integral, with boost tanh-sinh / exp-sinh.
double kernel_oracle(const HurstContext& c, double u, double v) {
  const double eta = c.eta, a = -u;
  const double cut = 1e-12 * a;
  auto inside = [&](double s) {
    if (-s < cut || s - u < cut) return 0.0;
    return xi_direct(eta - 1.0, s - u, v) * xi_direct(-eta - 1.0, -s, s - u) -
           xi_direct(eta - 1.0, a, v) * xi_direct(-eta - 1.0, -s, a);
  };
  auto before = [&](double x) { return -xi_direct(eta - 1.0, a, v) * xi_direct(-eta - 1.0, x + a, a); };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double I = ts.integrate(inside, u, 0.0, 1e-12) + es.integrate(before, 1e-12);
  return eta * c.cH * (eta * I - v * std::pow(v - u, eta - 1.0) * std::pow(a, -eta - 1.0));
}

GridPath past_grid(double U, double dt) {
  GridPath p;
  const std::size_t n = static_cast<std::size_t>(std::llround(U / dt));
  p.t0 = -static_cast<double>(n) * dt;
  p.dt = dt;
  p.kind = PathKind::fBm;
  p.values.assign(n + 1, 0.0);
  return p;
}

GridPath random_past(double U, double dt, std::uint64_t k) {
  GridPath p = past_grid(U, dt);
  RngStream r(99, k);
  for (std::size_t i = p.size() - 1; i-- > 0;) p.values[i] = p.values[i + 1] + std::sqrt(dt) * r.normal();
  return p;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e += (a[i] - b[i]) * (a[i] - b[i]);
    n += b[i] * b[i];
  }
  return std::sqrt(e / n);
}

}  // namespace

TEST_CASE("drift kernel agrees with an independent quadrature") {
  for (double H : {0.25, 0.75}) {
    const DriftKernelSpec spec{make_context(H), {}};
    for (auto [u, v] : {std::pair{-1.0, 1.0}, std::pair{-3.0, 0.5}, std::pair{-0.2, 2.0}}) {
      CAPTURE(H);
      CAPTURE(u);
      CAPTURE(v);
      CHECK(drift_kernel(spec, u, v) == Approx(kernel_oracle(spec.ctx, u, v)).epsilon(1e-6));
    }
  }
}

TEST_CASE("drift kernel vanishes as v -> 0 and at H = 1/2") {
  const DriftKernelSpec spec{make_context(0.75), {}};
  double prev = std::abs(drift_kernel(spec, -1.0, 1e-1));
  for (double v : {1e-2, 1e-3, 1e-4, 1e-6}) {
    const double k = std::abs(drift_kernel(spec, -1.0, v));
    CHECK(k < prev);
    prev = k;
  }
  CHECK(prev < 1e-5);
  CHECK(drift_kernel({make_context(0.5), {}}, -1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(drift_kernel(spec, 1.0, 1.0), DomainError);
}

TEST_CASE("kernel table interpolates the direct kernel and scales") {
  const DriftKernelSpec spec{make_context(0.25), {}};
  const DriftKernelTable t(spec);
  for (double x : {-1e-6, -0.03, -1.0, -7.5, -1e4}) CHECK(t(x) == Approx(drift_kernel(spec, x, 1.0)).epsilon(1e-6));
  CHECK(t.kernel(-2.0, 4.0) == Approx(drift_kernel(spec, -2.0, 4.0)).epsilon(1e-6));
}

TEST_CASE("drift operators: zero past and linearity") {
  const HurstContext c = make_context(0.75);
  DriftKernelSpec spec{c, {}};
  spec.quad.u_max = 8.0;
  const std::vector<double> vg{0.0, 0.25, 1.0};
  const double dt = 1.0 / 16;
  const GridPath zero = past_grid(8.0, dt);
  for (double y : drift_apply(spec, zero, vg).values) CHECK(y == 0.0);
  for (double y : drift_from_obm(c, zero, vg, spec.quad).values) CHECK(y == 0.0);
  for (double y : drift_regression(c, zero, vg).values) CHECK(y == 0.0);

  const GridPath x = random_past(8.0, dt, 1), y = random_past(8.0, dt, 2);
  GridPath comb = x;
  for (std::size_t i = 0; i < comb.size(); ++i) comb.values[i] = 2.5 * x.values[i] - 0.75 * y.values[i];
  auto lin = [&](auto&& op) {
    const auto a = op(x).values, b = op(y).values, ab = op(comb).values;
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(std::abs(ab[i] - (2.5 * a[i] - 0.75 * b[i])) <= 1e-10 * (std::abs(a[i]) + std::abs(b[i])));
  };
  lin([&](const GridPath& p) { return drift_apply(spec, p, vg); });
  lin([&](const GridPath& p) { return drift_from_obm(c, p, vg, spec.quad); });
  lin([&](const GridPath& p) { return drift_regression(c, p, vg); });
  CHECK(drift_apply(spec, x, vg).values[0] == 0.0);
}

TEST_CASE("drift_from_obm is zero when eta = 0") {
  const HurstContext c = make_context(0.5);
  QuadratureSpec q;
  q.u_max = 4.0;
  for (double y : drift_from_obm(c, random_past(4.0, 1.0 / 16, 3), {0.5, 1.0}, q).values) CHECK(y == 0.0);
}

TEST_CASE("drift_apply refuses a past shorter than the horizon") {
  DriftKernelSpec spec{make_context(0.75), {}};
  spec.quad.u_max = 16.0;
  CHECK_THROWS_AS(drift_apply(spec, past_grid(8.0, 0.125), {1.0}), DomainError);
}

TEST_CASE("an increasing recent past gives a positive drift for H > 1/2") {
  const HurstContext c = make_context(0.75);
  DriftKernelSpec spec{c, {}};
  spec.quad.u_max = 16.0;
  GridPath p = past_grid(16.0, 1.0 / 32);
  for (std::size_t i = 0; i < p.size(); ++i) p.values[i] = std::max(p.time(i), -1.0);
  const std::vector<double> vg{0.05, 0.1};
  const auto d = drift_apply(spec, p, vg).values, r = drift_regression(c, p, vg).values;
  for (std::size_t i = 0; i < vg.size(); ++i) {
    CHECK(d[i] > 0.0);
    CHECK(r[i] > 0.0);
  }
}

TEST_CASE("regression residual variance lies in [0, Var Z_v]") {
  for (double H : {0.25, 0.75}) {
    const std::vector<double> vg{0.1, 0.5, 1.0, 2.0};
    const RegressionOperator R(make_context(H), 1.0 / 32, 257, vg);
    for (std::size_t i = 0; i < vg.size(); ++i) {
      CHECK(R.residual_variance()[i] >= 0.0);
      CHECK(R.residual_variance()[i] <= std::pow(vg[i], 2.0 * H));
    }
    // conditioning on more of the past cannot increase the residual variance
    const RegressionOperator Rs(make_context(H), 1.0 / 32, 33, vg);
    for (std::size_t i = 0; i < vg.size(); ++i) CHECK(R.residual_variance()[i] <= Rs.residual_variance()[i] + 1e-12);
  }
}

TEST_CASE("regression_nodes thins long pasts and keeps both ends") {
  const auto all = regression_nodes(100);
  CHECK(all.size() == 99);
  const auto thin = regression_nodes(20001, 256);
  CHECK(thin.size() <= 256);
  CHECK(thin.front() == 0);
  for (std::size_t i = 1; i < thin.size(); ++i) CHECK(thin[i] > thin[i - 1]);
  CHECK(thin.back() < 20000);
}

TEST_CASE("kernel drift matches the Gaussian regression oracle on fBm pasts") {
  for (double H : {0.25, 0.75}) {
    CAPTURE(H);
    const HurstContext c = make_context(H);
    DriftKernelSpec spec{c, {}};
    spec.quad.u_max = 32.0;
    const double dt = 1.0 / 64;
    const std::size_t np = 32 * 64;
    const std::vector<double> vg{0.25, 0.5, 1.0};
    const DriftOperator D(std::make_shared<DriftKernelTable>(spec), dt, np + 1, vg);
    const RegressionOperator R(c, dt, np + 1, vg);
    std::vector<double> a, b;
    for (std::size_t k = 0; k < 20; ++k) {
      RngStream rng = RngStream(3, 0).substream(k);
      const BilateralPath z = sample_bilateral_fbm(c, np, 64, dt, rng);
      for (double y : D.apply(z.past).values) a.push_back(y);
      for (double y : R.apply(z.past).values) b.push_back(y);
    }
    CHECK(rel_l2(a, b) < 0.05);
  }
}

TEST_CASE("inversion is the identity at H = 1/2 and linear otherwise") {
  QuadratureSpec q;
  q.u_max = 4.0;
  GridPath z = random_past(4.0, 1.0 / 16, 7);
  // extend to positive times
  for (int k = 0; k < 32; ++k) z.values.push_back(z.values.back() + 0.25 * std::sin(k));
  const std::vector<double> tg{-2.0, -0.5, 0.5, 1.0, 2.0};
  const Trajectory w = pipiras_taqqu_invert(make_context(0.5), z, tg, q);
  for (std::size_t i = 0; i < tg.size(); ++i) CHECK(w.values[i] == Approx(z.values[z.index_of(tg[i])]).epsilon(1e-12));

  const HurstContext c = make_context(0.3);
  GridPath zero = z;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  for (double y : pipiras_taqqu_invert(c, zero, tg, q).values) CHECK(y == 0.0);
  GridPath z2 = z;
  for (std::size_t i = 0; i < z2.size(); ++i) z2.values[i] = 3.0 * z.values[i];
  const auto a = pipiras_taqqu_invert(c, z, tg, q).values, b = pipiras_taqqu_invert(c, z2, tg, q).values;
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == Approx(3.0 * a[i]).epsilon(1e-10));
}
