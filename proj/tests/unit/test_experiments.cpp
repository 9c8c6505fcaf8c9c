#include <cmath>

#include "doctest.h"
#include "fracdrift/errors.hpp"
#include "fracdrift/experiments.hpp"

using namespace fracdrift;
using doctest::Approx;

TEST_CASE("log_plus convention") {
  CHECK(log_plus(0) == 0.0);
  CHECK(log_plus(1) == 0.0);
  CHECK(log_plus(10) == Approx(std::log(10.0)));
}

TEST_CASE("lambda_r") {
  const HurstContext c = make_context(0.75);
  CHECK(lambda_r(c, 0.1) == Approx(0.6255).epsilon(1e-4));
  CHECK(lambda_r(c, 0.1) == Approx(0.6254776963385202).epsilon(1e-13));
  CHECK(lambda_r(c, 0.5) < 0.0);
  CHECK(lambda_r(c, 1e-6) == Approx(1.0 / std::sqrt(0.75)).epsilon(1e-3));
}

TEST_CASE("n_threshold") {
  CHECK(n_threshold(0.75, 0.75, 0.25, 0.5, 0.4) == 211);
  CHECK_THROWS_AS(n_threshold(0.75, 0.25, 0.5, 0.5, 0.4), DomainError);
  CHECK_THROWS_AS(n_threshold(0.75, 0.75, 0.25, 0.4, 0.5), DomainError);
  // nonincreasing in alpha - alpha' and in p - p'
  for (double H : {0.1, 0.5, 0.9})
    for (double gap_a = 0.3; gap_a < 0.95; gap_a += 0.1)
      for (double gap_p = 0.1; gap_p < 0.8; gap_p += 0.1) {
        const auto t = n_threshold(H, 0.97, 0.97 - gap_a, 0.9, 0.9 - gap_p);
        CHECK(t >= n_threshold(H, 0.97, 0.97 - gap_a - 0.05, 0.9, 0.9 - gap_p));
        CHECK(t >= n_threshold(H, 0.97, 0.97 - gap_a, 0.9, 0.9 - gap_p - 0.05));
      }
}

TEST_CASE("ceil_inverse_power is exact") {
  for (std::size_t n = 0; n <= 20; ++n) CHECK(ceil_inverse_power(0.5, n) == (BigInt(1) << n));
  CHECK(ceil_inverse_power(0.1, 30) == BigInt("1000000000000000000000000000000"));
  CHECK(ceil_inverse_power(0.3, 2) == 12);  // 11.11... rounded up
}

TEST_CASE("gamma covariance matrix is Toeplitz") {
  GammaConfig g;
  g.ctx = make_context(0.75);
  g.r = 0.1;
  const Eigen::MatrixXd m = gamma_covariance_matrix(g, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      CHECK(m(i, j) == m(j, i));
      CHECK(m(i, j) == Approx(m(std::abs(i - j), 0)).epsilon(1e-12));
    }
}

TEST_CASE("ledger is monotone in P(A'_n)") {
  ArbitrageConfig cfg;
  cfg.ctx = make_context(0.75);
  cfg.alpha_prime = 0.25;
  cfg.p_prime = 0.4;
  cfg.r_tilde = 0.05;
  const std::vector<std::size_t> ns{1, 2, 4, 8};
  const ExperimentReport lo = union_bound_ledger(cfg, ns, {1e-3, 1e-4, 1e-6, 1e-9});
  const ExperimentReport hi = union_bound_ledger(cfg, ns, {2e-3, 1e-3, 1e-5, 1e-8});
  const auto* a = lo.find_trend("assembled_bound");
  const auto* b = hi.find_trend("assembled_bound");
  REQUIRE(a);
  REQUIRE(b);
  for (std::size_t i = 0; i < ns.size(); ++i) CHECK((*a)[i] < (*b)[i]);
  CHECK(lo.passed());
  const auto* ci = lo.find_trend("ceil_inverse_T");
  CHECK((*ci)[3] == 25600000000.0);  // ceil(20^8)
}

TEST_CASE("product tail bound chain at small eps") {
  ArbitrageConfig cfg;
  cfg.ctx = make_context(0.75);
  cfg.p = 0.3;
  const ProductTailBound b = product_tail_bound(cfg, 10, {3, 5, 9}, 0.02, 0.2);
  CHECK(b.chain_ok);
  CHECK(b.log_product <= b.log_gaussian_bound + 1e-12);
  CHECK(b.log_gaussian_bound <= b.log_ordered_bound + 1e-12);
  // independence: the product is the sum of the factor logs
  double s = 0.0;
  for (double f : b.log_factors) s += f;
  CHECK(b.log_product == Approx(s).epsilon(1e-14));
  // ordered-index step: i_j >= j
  const double c2 = b.c_l * b.c_l / 2.0;
  CHECK(-c2 * (std::log(3.0) + std::log(5.0) + std::log(9.0)) <= -c2 * (std::log(1.0) + std::log(2.0)) + 1e-12);
  cfg.r = 0.1;
  CHECK_THROWS_AS(product_tail_bound(cfg, 10, {3, 5, 9}), DomainError);
}

TEST_CASE("P(A_1) = 1/2 and the calibration control does not decay") {
  ArbitrageConfig cfg;
  cfg.ctx = make_context(0.75);
  cfg.r = 0.1;
  cfg.alpha = 0.0;
  cfg.p = 0.4;
  cfg.n_ladder = {1, 4, 8, 16};
  cfg.n_paths = 20000;
  cfg.dual_max_n = 8;
  cfg.seed = 3;
  const ExperimentReport r = a_n_probability(cfg);
  for (std::size_t n : {4, 8, 16}) CHECK(r.find_estimate("P_A_" + std::to_string(n))->value > 0.1);
  for (std::size_t n : {4, 8}) CHECK(r.find_estimate("dual_P_A_" + std::to_string(n))->value > 0.1);
  const Estimate* p1 = r.find_estimate("P_A_1");
  CHECK(p1->ci_low <= 0.5);
  CHECK(p1->ci_high >= 0.5);
}

TEST_CASE("arbitrage config validation") {
  ArbitrageConfig cfg;
  cfg.ctx = make_context(0.75);
  cfg.p = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.p = 0.5;
  cfg.alpha_prime = 0.7;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.alpha_prime.reset();
  cfg.r_tilde = 0.2;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("LIL sampler: Y = Y-tilde + Y' and the Y-tilde variance") {
  const HurstContext c = make_context(0.75);
  const LevyScaleSampler s(c, 0.5, 12);
  CHECK(s.tilde_variance() == Approx(std::pow(0.5, 1.5) / 1.5).epsilon(1e-12));
  LevyScaleSampler::Sample x;
  RngStream r(4, 4);
  s.sample(r, x);
  for (std::size_t i = 0; i < x.x.size(); ++i) CHECK(x.x[i] == Approx(x.x_tilde[i] + x.x_prime[i]).epsilon(1e-14));
}

TEST_CASE("LIL config validation") {
  LilConfig cfg;
  cfg.ctx = make_context(0.75);
  cfg.i_max_ladder = {1};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.i_max_ladder = {10, 20};
  cfg.r = 1e-30;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}
