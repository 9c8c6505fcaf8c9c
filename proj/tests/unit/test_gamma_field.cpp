#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracdrift/gamma_field.hpp"
#include "fracdrift/subgaussian.hpp"

using namespace fracdrift;
using doctest::Approx;

namespace {

GammaConfig config(double H, double r) {
  GammaConfig g;
  g.ctx = make_context(H);
  g.r = r;
  return g;
}

// sigma^2 = c1^{-2} - 1/(2H), with c1 from its Gamma-function closed form.
double sigma2_oracle(double H) {
  const double c1sq = std::tgamma(2.0 * H + 1.0) * std::sin(std::numbers::pi * H) / std::pow(std::tgamma(H + 0.5), 2);
  return 1.0 / c1sq - 1.0 / (2.0 * H);
}

}  // namespace

TEST_CASE("Var Gamma matches the closed-form oracle") {
  for (double H : {0.25, 0.7, 0.75}) {
    CAPTURE(H);
    CHECK(gamma_variance(config(H, 0.5)) == Approx(sigma2_oracle(H)).epsilon(1e-8));
  }
  // frozen from mpmath quad of int_0^inf ((1+x)^0.2 - x^0.2)^2 dx
  CHECK(gamma_variance(config(0.7, 0.5)) == Approx(0.12460725758612928).epsilon(1e-8));
  CHECK(gamma_variance(config(0.5, 0.5)) == 0.0);
}

TEST_CASE("Gamma covariance is stationary") {
  const GammaConfig g = config(0.75, 0.5);
  const double s2 = gamma_variance(g);
  for (std::size_t i : {0, 5, 20}) CHECK(gamma_cov(g, i, i) == Approx(s2).epsilon(1e-8));
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 3}, {2, 5}, {7, 4}}) {
    CHECK(gamma_cov(g, i, j) == gamma_cov(g, j, i));
    CHECK(gamma_cov_direct(g, i, j) == Approx(gamma_cov(g, i, j)).epsilon(1e-7));
  }
}

TEST_CASE("decay profile: rho_0 = 1, |rho| <= 1, bound holds on computed lags") {
  for (double r : {0.1, 0.5}) {
    const GammaCovariance p = decay_bound_check(config(0.75, r), 12);
    CHECK(p.rho[0] == Approx(1.0));
    CHECK(p.cf_fit >= p.sigma2);
    for (std::size_t d = 0; d < p.rho.size(); ++d) {
      CHECK(std::abs(p.rho[d]) <= 1.0);
      CHECK(std::abs(p.cov[d]) <= p.cf_fit * std::pow(r, 0.25 * d) * (1 + 1e-12));
    }
    CHECK(p.bounded);
  }
}

TEST_CASE("smaller r decorrelates faster") {
  const GammaCovariance a = decay_bound_check(config(0.75, 0.1), 10), b = decay_bound_check(config(0.75, 0.5), 10);
  for (std::size_t d = 1; d <= 10; ++d) CHECK(std::abs(a.cov[d]) < std::abs(b.cov[d]));
  double prev = 1.0;
  for (double r : {0.5, 0.2, 0.1, 0.05}) {
    const double eps = decay_bound_check(config(0.75, r), 10).eps;
    CHECK(eps < prev);
    prev = eps;
  }
}

TEST_CASE("Gamma-hat modulus decreases to 0 and is O(t^{2H^1})") {
  for (double H : {0.25, 0.75}) {
    const GammaConfig g = config(H, 0.1);
    const double e = H < 0.5 ? 2.0 * H : 1.0;
    double prev = gammahat_modulus(g, 1.0);
    for (int k = 1; k <= 20; ++k) {
      const double t = std::ldexp(1.0, -k);
      const double m = gammahat_modulus(g, t);
      CHECK(m < prev);
      CHECK(m / std::pow(t, e) <= c_e(g) * (1 + 1e-12));
      prev = m;
    }
    CHECK(prev < 1e-2);
    CHECK(std::isfinite(c_e(g)));
  }
}

TEST_CASE("Gamma-hat autocovariance at lag 0 is sigma^2") {
  const GammaConfig g = config(0.75, 0.1);
  CHECK(gammahat_autocov(g, 0.0) == Approx(gamma_variance(g)));
  CHECK(gammahat_autocov(g, 0.5) == Approx(gamma_variance(g) - 0.5 * gammahat_modulus(g, 0.5)));
}

TEST_CASE("reg_gamhat_bound: constants, i shift and monotonicity in T") {
  const GammaConfig g = config(0.75, 0.1);
  const RegGamhatConstants k = reg_gamhat_constants(g);
  const SubGaussianConstants s = subgaussian_constants(0.5);
  CHECK(k.theta == 0.5);
  CHECK(k.c_c == s.c_c);
  CHECK(k.c_d == s.c_d);
  CHECK(k.c_a == Approx(k.c_c / k.c_e));
  CHECK(k.c_b == std::max(k.c_d, std::exp(k.c_a)));
  for (std::size_t i : {1, 2, 3})
    for (double T : {0.05, 0.5, 3.0})
      CHECK(reg_gamhat_bound(k, 0.1, i, T) == Approx(reg_gamhat_bound(k, 0.1, 0, T / std::pow(0.1, i))).epsilon(1e-14));
  double prev = 0.0;
  for (double T : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    const double b = reg_gamhat_bound(k, 0.1, 0, T);
    CHECK(b > prev);
    prev = b;
  }
}

TEST_CASE("gamma config validation") {
  GammaConfig g = config(0.75, 1.0);
  CHECK_THROWS(g.validate());
  g.r = 0.5;
  g.n = 0;
  CHECK_THROWS(g.validate());
}
