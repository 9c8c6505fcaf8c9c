#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "fracdrift/cov_matrix.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/rng.hpp"
#include "fracdrift/stats.hpp"
#include "fracdrift/xi.hpp"

using namespace fracdrift;
using doctest::Approx;

namespace {

// c1 from the closed form sqrt(Gamma(2H+1) sin(pi H)) / Gamma(H + 1/2).
double c1_closed_form(double H) {
  return std::sqrt(std::tgamma(2.0 * H + 1.0) * std::sin(std::numbers::pi * H)) / std::tgamma(H + 0.5);
}

// c1 from its defining integral by tanh-sinh (a different scheme from the library), with
// [1, inf) mapped to (0, 1] by s = 1/x.
double c1_by_tanh_sinh(double H) {
  const double eta = H - 0.5;
  auto f = [eta](double s) {
    const double d = std::pow(1.0 + s, eta) - std::pow(s, eta);
    return d * d;
  };
  boost::math::quadrature::tanh_sinh<double> q;
  // f(1/x) / x^2 with (1 + 1/x)^eta - x^{-eta} = x^{-eta} expm1(eta log1p(x))
  auto g = [eta](double x) {
    const double d = std::expm1(eta * std::log1p(x)) / x;
    return std::pow(x, -2.0 * eta) * d * d;
  };
  const double I = q.integrate(f, 0.0, 1.0, 1e-13) + q.integrate(g, 0.0, 1.0, 1e-13);
  return 1.0 / std::sqrt(1.0 / (2.0 * H) + I);
}

}  // namespace

TEST_CASE("make_context at H = 1/2 is the identity normalization") {
  const HurstContext c = make_context(0.5);
  CHECK(c.eta == 0.0);
  CHECK(c.c1 == Approx(1.0).epsilon(1e-15));
  CHECK(c.cH == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("c1 agrees with two independent oracles") {
  for (double H : {0.1, 0.25, 0.4, 0.6, 0.75, 0.9}) {
    CAPTURE(H);
    const HurstContext c = make_context(H);
    CHECK(c.c1 == Approx(c1_closed_form(H)).epsilon(1e-8));
    CHECK(c.c1 == Approx(c1_by_tanh_sinh(H)).epsilon(1e-8));
  }
  // frozen from an mpmath evaluation of the closed form (30 digits)
  CHECK(make_context(0.75).c1 == Approx(1.0696446350319903).epsilon(1e-10));
  CHECK(make_context(0.25).c1 == Approx(0.6459980037407520).epsilon(1e-10));
}

TEST_CASE("cH equals sin(pi eta) / (pi eta)") {
  for (double H : {0.2, 0.75, 0.95}) {
    const double eta = H - 0.5;
    CHECK(make_context(H).cH == Approx(std::sin(std::numbers::pi * eta) / (std::numbers::pi * eta)).epsilon(1e-12));
  }
}

TEST_CASE("euler_pi matches boost tgamma") {
  for (double x : {-0.45, -0.25, 0.0, 0.3, 1.5, 2.7}) CHECK(euler_pi(x) == Approx(boost::math::tgamma(x + 1.0)).epsilon(1e-13));
}

TEST_CASE("make_context rejects H outside (0, 1)") {
  for (double H : {0.0, 1.0, -0.2, 1.5, std::nan("")}) CHECK_THROWS_AS(make_context(H), DomainError);
}

TEST_CASE("fbm_cov examples and symmetry") {
  for (double H : {0.1, 0.5, 0.75}) CHECK(fbm_cov(make_context(H), 1.0, 1.0) == Approx(1.0));
  CHECK(fbm_cov(make_context(0.5), 1.0, 2.0) == Approx(1.0));
  CHECK(fbm_cov(make_context(0.75), 1.0, 2.0) == Approx(std::sqrt(2.0)).epsilon(1e-14));
  const HurstContext c = make_context(0.3);
  for (double s : {-1.5, 0.0, 0.7})
    for (double t : {-0.2, 0.4, 3.0}) {
      CHECK(fbm_cov(c, s, t) == fbm_cov(c, t, s));
      CHECK(fbm_cov(c, t, t) == Approx(std::pow(std::abs(t), 0.6)));
    }
}

TEST_CASE("levy_cov examples") {
  const HurstContext half = make_context(0.5);
  for (double v : {0.3, 1.0, 4.0}) CHECK(levy_cov(half, v, v) == Approx(v).epsilon(1e-10));
  for (double H : {0.25, 0.75}) {
    const HurstContext c = make_context(H);
    CHECK(levy_cov(c, 0.0, 1.3) == 0.0);
    for (double v : {0.5, 1.0, 2.0})
      CHECK(levy_cov(c, v, v) == Approx(c.c1 * c.c1 * std::pow(v, 2.0 * H) / (2.0 * H)).epsilon(1e-10));
  }
  // frozen from mpmath: c1^2 int_0^1 (1-u)^0.2 (2-u)^0.2 du at H = 0.7
  CHECK(levy_cov(make_context(0.7), 1.0, 2.0) == Approx(1.0807966942246248).epsilon(1e-8));
  CHECK_THROWS_AS(levy_cov(make_context(0.7), -1.0, 2.0), DomainError);
}

TEST_CASE("levy_cov_matrix agrees with levy_cov") {
  const HurstContext c = make_context(0.25);
  const Eigen::MatrixXd m = levy_cov_matrix(c, 12, 0.1);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) CHECK(m(i, j) == Approx(levy_cov(c, 0.1 * (i + 1), 0.1 * (j + 1))).epsilon(1e-9));
}

TEST_CASE("xi examples") {
  for (double a : {0.1, 1.0, 7.0})
    for (double b : {0.01, 2.0}) {
      CHECK(xi(1.0, a, b) == Approx(b).epsilon(1e-14));
      CHECK(xi(0.0, a, b) == 0.0);
    }
  CHECK(xi(-1.0, 1.0, 1.0) == Approx(-0.5).epsilon(1e-15));
  // no cancellation for b << a
  CHECK(xi(0.25, 1.0, 1e-12) == Approx(0.25e-12).epsilon(1e-9));
  CHECK_THROWS_AS(xi(0.5, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(xi(0.5, 1.0, -1.0), DomainError);
}

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(7, 1), b(7, 1), c(7, 2);
  for (int k = 0; k < 100; ++k) {
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
  }
  RngStream s1 = RngStream(7, 1).substream(3), s2 = RngStream(7, 1).substream(3), s3 = RngStream(7, 1).substream(4);
  const double u = s1.uniform();
  CHECK(u == s2.uniform());
  CHECK(u != s3.uniform());
  CHECK(u > 0.0);
  CHECK(u < 1.0);
}

TEST_CASE("normal draws have unit variance") {
  RngStream r(11, 5);
  Moments m;
  for (int k = 0; k < 200000; ++k) m.add(r.normal());
  CHECK(std::abs(m.mean()) < 4.0 * m.std_error());
  CHECK(std::abs(m.variance() - 1.0) < 4.0 * std::sqrt(2.0 / 200000.0));
}

TEST_CASE("sample_fbm with one step is (0, g dt^H)") {
  const HurstContext c = make_context(0.3);
  RngStream r1(3, 9), r2(3, 9);
  const GridPath p = sample_fbm(c, 1, 0.01, r1);
  REQUIRE(p.size() == 2);
  CHECK(p.values[0] == 0.0);
  // the increment is a fixed linear functional of the stream; rescaling dt rescales it by dt^H
  const GridPath q = sample_fbm(c, 1, 1.0, r2);
  CHECK(p.values[1] == Approx(q.values[1] * std::pow(0.01, 0.3)).epsilon(1e-12));
}

TEST_CASE("sample_fbm is deterministic and pinned at 0") {
  for (auto method : {SampleMethod::circulant, SampleMethod::cholesky}) {
    const HurstContext c = make_context(0.75);
    RngStream r1(5, 1), r2(5, 1);
    const GridPath a = sample_fbm(c, 100, 0.01, r1, method), b = sample_fbm(c, 100, 0.01, r2, method);
    CHECK(a.values == b.values);
    CHECK(a.values.front() == 0.0);
    CHECK(a.size() == 101);
  }
}

TEST_CASE("fBm increments: circulant embedding is nonnegative definite") {
  for (double H : {0.1, 0.25, 0.5, 0.75, 0.95}) {
    FbmSampler s(make_context(H), 1000, 0.001);
    CHECK(s.method() == SampleMethod::circulant);
    CHECK(s.min_eigen_ratio() >= -1e-9);
  }
}

TEST_CASE("empirical Var(Z_t) matches t^{2H}") {
  const HurstContext c = make_context(0.25);
  const std::size_t n_paths = 20000, n = 16;
  const FbmSampler s(c, n, 1.0 / 16);
  std::vector<Moments> m(n + 1);
  for (std::size_t k = 0; k < n_paths; ++k) {
    RngStream r = RngStream(21, 0).substream(k);
    const GridPath p = s.sample(r);
    for (std::size_t i = 1; i <= n; ++i) m[i].add(p.values[i] * p.values[i]);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    CAPTURE(i);
    CHECK(std::abs(m[i].mean() - std::pow(i / 16.0, 0.5)) < 4.5 * m[i].std_error());
  }
}

TEST_CASE("split_bilateral pins the split node") {
  const HurstContext c = make_context(0.6);
  RngStream r(2, 2);
  const BilateralPath b = sample_bilateral_fbm(c, 10, 5, 0.1, r);
  CHECK(b.past.size() == 11);
  CHECK(b.future.size() == 6);
  CHECK(b.past.values.back() == 0.0);
  CHECK(b.future.values.front() == 0.0);
  CHECK(b.past.t0 == Approx(-1.0));
  CHECK_THROWS_AS(split_bilateral(b.future, 6), DomainError);
}

TEST_CASE("sample_obm is pinned at 0 with the right grid") {
  RngStream r(1, 1);
  const GridPath w = sample_obm(8, 4, 0.25, r);
  CHECK(w.size() == 13);
  CHECK(w.values[w.index_of(0.0)] == 0.0);
  CHECK(w.t0 == Approx(-2.0));
}

TEST_CASE("CovMatrix reproduces its entries and handles a singular matrix") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 2, 0.4, 2, 3, 0.5, 0.4, 0.5, 1;
  const CovMatrix c(a);
  CHECK(c.jitter() == 0.0);
  CHECK(c.reconstruction_error() < 1e-14);
  const Eigen::VectorXd b = Eigen::Vector3d(1, 2, 3);
  CHECK((a * c.solve(b) - b).norm() < 1e-12);
  Eigen::MatrixXd s = Eigen::MatrixXd::Ones(4, 4);
  const CovMatrix cs(s);
  CHECK(cs.jitter() > 0.0);
  CHECK(cs.reconstruction_error() < 1e-6);
}

TEST_CASE("Cosimulator: fBm built from oBm has the fBm variance") {
  const HurstContext c = make_context(0.75);
  const std::size_t n_past = 256, n_future = 16;
  const double dt = 1.0 / 16;
  const Cosimulator cs(c, n_past + n_future + 1, dt);
  Moments m;
  for (std::size_t k = 0; k < 4000; ++k) {
    RngStream r = RngStream(8, 0).substream(k);
    const GridPath w = sample_obm(n_past, n_future, dt, r);
    const GridPath z = cs.fbm_from_obm(w);
    const double z1 = z.values[z.index_of(1.0)];
    m.add(z1 * z1);
  }
  // on a finite window the variance is below 1 by the part of the kernel before -U
  CHECK(m.mean() < 1.0 + 4.0 * m.std_error());
  CHECK(m.mean() > 0.9);
}

TEST_CASE("integrate_by_parts_eval: zero path and co-simulation consistency") {
  const HurstContext c = make_context(0.75);
  QuadratureSpec q;
  q.u_max = 16.0;
  q.truncation_tol = 1.0;  // the windowed pair is exact under flat extension before -U
  const double dt = 1.0 / 64;
  const std::size_t n_past = 16 * 64, n_future = 64;
  GridPath w;
  w.t0 = -16.0;
  w.dt = dt;
  w.kind = PathKind::oBm;
  w.values.assign(n_past + n_future + 1, 0.0);
  CHECK(integrate_by_parts_eval(c, w, 1.0, q).value == 0.0);

  const Cosimulator cs(c, n_past + n_future + 1, dt);
  double err2 = 0.0, ref2 = 0.0;
  for (std::size_t k = 0; k < 20; ++k) {
    RngStream r = RngStream(4, 0).substream(k);
    const GridPath wp = sample_obm(n_past, n_future, dt, r);
    const GridPath z = cs.fbm_from_obm(wp);
    const double exact = z.values[z.index_of(1.0)] / c.c1;
    const double got = integrate_by_parts_eval(c, wp, 1.0, q).value;
    err2 += (got - exact) * (got - exact);
    ref2 += exact * exact;
  }
  CHECK(std::sqrt(err2 / ref2) < 0.02);
}

TEST_CASE("chunked_reduce does not depend on the thread count") {
  struct Acc {
    Moments m;
    void merge(const Acc& o) { m.merge(o.m); }
  };
  auto run = [](unsigned threads) {
    return chunked_reduce(
        10007, 97, threads, [] { return Acc{}; },
        [](Acc& a, std::size_t i) {
          RngStream r = RngStream(1, 2).substream(i);
          a.m.add(r.normal());
        });
  };
  const Acc a = run(1), b = run(3), c = run(8);
  CHECK(a.m.mean() == b.m.mean());
  CHECK(a.m.variance() == b.m.variance());
  CHECK(a.m.mean() == c.m.mean());
  CHECK(a.m.count() == 10007);
}
