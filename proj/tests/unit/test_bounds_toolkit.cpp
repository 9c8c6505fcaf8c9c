#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "doctest.h"
#include "fracdrift/bounds_reports.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/matrix_lemma.hpp"
#include "fracdrift/subgaussian.hpp"
#include "fracdrift/thick_set.hpp"
#include "fracdrift/word_coding.hpp"

using namespace fracdrift;
using doctest::Approx;

namespace {

// Counts valid tuples by walking every (s_1, ..., s_{k-1}) with |steps| summing to n.
std::uint64_t brute_count(long z, unsigned k, unsigned n) {
  std::uint64_t count = 0;
  auto rec = [&](auto&& self, long pos, unsigned left_steps, long left_len) -> void {
    if (left_steps == 1) {
      if (z != pos && static_cast<long>(std::labs(z - pos)) == left_len) ++count;
      return;
    }
    for (long d = 1; d <= left_len; ++d)
      for (long s : {pos + d, pos - d}) self(self, s, left_steps - 1, left_len - d);
  };
  rec(rec, 0, k, static_cast<long>(n));
  return count;
}

}  // namespace

TEST_CASE("Phi functions decrease to 1 as eps -> 0") {
  const double eps_seq[] = {0.2, 0.1, 0.05, 0.01, 0.001};
  PhiFunctions prev = phi_functions(eps_seq[0]);
  for (std::size_t k = 1; k < 5; ++k) {
    const PhiFunctions p = phi_functions(eps_seq[k]);
    const double now[] = {p.phi_m, p.phi_g, p.phi_h, p.phi_i, p.phi_n, p.phi_j, p.phi_k};
    const double before[] = {prev.phi_m, prev.phi_g, prev.phi_h, prev.phi_i, prev.phi_n, prev.phi_j, prev.phi_k};
    for (int f = 0; f < 7; ++f) {
      CAPTURE(k);
      CAPTURE(f);
      CHECK(now[f] >= 1.0);
      if (std::isfinite(before[f])) CHECK(now[f] <= before[f]);
    }
    prev = p;
  }
  // the leading corrections are O(eps)
  CHECK(prev.phi_g == Approx(1.0).epsilon(1e-2));
  CHECK(prev.phi_k == Approx(1.0).epsilon(1e-2));
}

TEST_CASE("Phi functions diverge outside their radius") {
  CHECK(std::isinf(phi_functions(0.4).phi_g));
  CHECK(phi_n(1e-300) == Approx(1.0));
  CHECK(std::isinf(phi_n(1.0 / (4.0 * std::numbers::e))));
  CHECK_THROWS_AS(phi_functions(0.0), DomainError);
}

TEST_CASE("Phi_m matches its series") {
  const double eps = 0.07;
  double s = 0.0;
  for (int m = 2; m < 200; ++m) s += (2 * m - 1) * std::pow(2 * eps, 2 * m);
  CHECK(phi_functions(eps).phi_m == Approx(1.0 + s / (2 * eps * eps)).epsilon(1e-13));
}

TEST_CASE("identity matrix has slack margins") {
  for (double eps : {0.01, 0.1}) {
    const MatrixBoundsReport r = matrix_bounds_check(Eigen::MatrixXd::Identity(8, 8), eps);
    CHECK(r.ok());
    CHECK(r.det == 1.0);
    CHECK(r.det_margin > 0.0);
    CHECK(r.offdiag_margin > 0.0);
    CHECK(r.diag_margin > 0.0);
  }
}

TEST_CASE("hypothesis violations are reported with the offending entries") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  a(0, 2) = 0.5;
  a(3, 3) = 1.1;
  try {
    check_hypothesis(a, 0.1);
    FAIL("expected HypothesisError");
  } catch (const HypothesisError& e) {
    REQUIRE(e.entries().size() == 2);
    std::set<std::pair<std::size_t, std::size_t>> where;
    for (const auto& v : e.entries()) where.insert({v.i, v.j});
    CHECK(where.count({0, 2}) == 1);
    CHECK(where.count({3, 3}) == 1);
  }
}

TEST_CASE("matrix lemma holds on random and adversarial instances") {
  for (std::size_t n : {4, 8, 16})
    for (double eps : {0.01, 0.05, 0.1}) {
      const MatrixBatchSummary s = matrix_bounds_batch(n, eps, 200, 3);
      CHECK(s.violations() == 0);
      CHECK(s.trials == 203);
    }
  for (auto kind : {AdversarialKind::all_positive, AdversarialKind::alternating, AdversarialKind::all_negative}) {
    const Eigen::MatrixXd a = adversarial_almost_diagonal(64, 0.1, kind);
    const MatrixBoundsReport r = matrix_bounds_check(a, 0.1);
    CHECK(r.ok());
    CHECK(r.norm_h <= r.norm_bound * (1 + 1e-12));  // equal up to eps^n
  }
}

TEST_CASE("random almost-diagonal matrices satisfy the hypothesis and the norm bound") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Eigen::MatrixXd a = random_almost_diagonal(10, 0.2, 5, k);
    CHECK_NOTHROW(check_hypothesis(a, 0.2));
    const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(10, 10) - a;
    CHECK(h.cwiseAbs().colwise().sum().maxCoeff() <= 2 * 0.2 / 0.8);
  }
}

TEST_CASE("hk_entry_bound dominates |H^k| entries") {
  const double eps = 0.1;
  const Eigen::MatrixXd a = adversarial_almost_diagonal(24, eps, AdversarialKind::all_positive);
  const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(24, 24) - a;
  Eigen::MatrixXd hk = h;
  for (unsigned k = 1; k <= 4; ++k) {
    for (long z : {0L, 1L, 3L}) CHECK(std::abs(hk(10, 10 + z)) <= hk_entry_bound(z, k, eps, 40) * (1 + 1e-12));
    hk = hk * h;
  }
}

TEST_CASE("word coding: worked instance") {
  const std::vector<long> t{0, 1, 4, 2, 1, 2};
  const std::string w = encode_tuple(t);
  CHECK(w == "PppPmMMP");
  CHECK(std::count_if(w.begin(), w.end(), [](char c) { return c == 'P' || c == 'M'; }) == 5);
  CHECK(decode_word(w) == t);
  CHECK_THROWS_AS(decode_word("Ppx"), DomainError);
  CHECK_THROWS_AS(decode_word("Pp"), DomainError);
}

TEST_CASE("valid_tuple_count: k = 1, symmetry, brute force, bound") {
  for (long z = -4; z <= 4; ++z)
    for (unsigned n = 0; n <= 6; ++n) CHECK(valid_tuple_count(z, 1, n) == ((std::labs(z) == n && n > 0) ? 1 : 0));
  for (long z = 0; z <= 5; ++z)
    for (unsigned k = 1; k <= 4; ++k)
      for (unsigned n = 0; n <= 10; ++n) {
        CAPTURE(z);
        CAPTURE(k);
        CAPTURE(n);
        const BigInt c = valid_tuple_count(z, k, n);
        CHECK(c == valid_tuple_count(-z, k, n));
        CHECK(c == brute_count(z, k, n));
        CHECK(c <= coding_count_bound(z, k, n));
      }
  CHECK(coding_count_bound(3, 2, 6) == 0);  // parity
  // big-integer counts stay exact
  CHECK(valid_tuple_count(0, 20, 200) > BigInt(std::numeric_limits<std::uint64_t>::max()));
}

TEST_CASE("enumeration matches counting and every tuple round-trips through its code") {
  const auto ts = enumerate_valid_tuples(2, 3, 6);
  CHECK(BigInt(ts.size()) == valid_tuple_count(2, 3, 6));
  std::set<std::string> words;
  for (const auto& t : ts) {
    const std::string w = encode_tuple(t);
    CHECK(w.size() == 6);
    CHECK(decode_word(w) == t);
    words.insert(w);
  }
  CHECK(words.size() == ts.size());
}

TEST_CASE("coding bound report over the acceptance range") {
  const CodingCheckSummary s = verify_coding_bound(6, 4, 12);
  CHECK(s.violations == 0);
  CHECK(s.enumeration_mismatches == 0);
  CHECK(s.coding_failures == 0);
  CHECK(s.cases > 0);
}

TEST_CASE("thick set densities") {
  CHECK(upper_density(ThickSet::from_generator("evens", 1000), 1000) == Approx(0.5));
  CHECK(upper_density(ThickSet::from_generator("squares", 1000000), 1000000) == Approx(0.001));
  const ThickSet nat = ThickSet::from_generator("naturals", 4096);
  for (std::size_t n : {1, 7, 4096}) CHECK(upper_density(nat, n) == 1.0);
  CHECK(is_thick_estimate(nat).looks_thick);
  CHECK_FALSE(is_thick_estimate(ThickSet::from_generator("squares", 1 << 20)).looks_thick);
  CHECK(is_thick_estimate(ThickSet::from_generator("blocks", 1 << 20)).looks_thick);
}

TEST_CASE("thick set prefix agrees with its generator") {
  for (const char* g : {"odds", "multiples:3", "residue:5:2", "bernoulli:0.3:9", "blocks"}) {
    const ThickSet s = ThickSet::from_generator(g, 5000);
    CHECK(s.consistent_with_generator());
    CHECK(s.count_below(5000) == s.elements().size());
  }
  CHECK_THROWS(ThickSet::from_generator("nonsense", 10));
}

TEST_CASE("residue class split") {
  const ResidueSplit m3 = residue_class_split(ThickSet::from_generator("multiples:3", 3000), 3);
  CHECK(m3.class_density[0] == Approx(1.0));
  CHECK(m3.class_density[1] == 0.0);
  CHECK(m3.class_density[2] == 0.0);
  CHECK(m3.argmax == 0);
  const ResidueSplit ev = residue_class_split(ThickSet::from_generator("evens", 1000), 2);
  CHECK(ev.class_density[0] == Approx(1.0));
  CHECK(ev.class_density[1] == 0.0);
  for (std::uint64_t seed : {1, 2, 3})
    for (std::size_t k : {2, 3, 7}) {
      const ThickSet b = ThickSet::from_generator("bernoulli:0.3:" + std::to_string(seed), 20000);
      const ResidueSplit s = residue_class_split(b, k);
      CHECK(s.class_density[s.argmax] >= s.density - 2.0 / std::sqrt(20000.0));
      CHECK(s.slack >= -1e-12);
    }
}

TEST_CASE("harmonic sub-sums") {
  const ThickSet nat = ThickSet::from_generator("naturals", 1000000);
  CHECK(harmonic_subsum(nat, 1000000) == Approx(std::log(1e6) + std::numbers::egamma).epsilon(1e-3));
  const double sq = harmonic_subsum(ThickSet::from_generator("squares", 1000000), 1000000);
  CHECK(sq < 1.645);
  CHECK(sq == Approx(1.6439335666815615).epsilon(1e-12));  // sum of 1/k^2 for k < 1000
}

TEST_CASE("n_k ladder certifies increments") {
  const NkLadder l = nk_ladder(0.4, 0.3, ThickSet::from_generator("evens", 1 << 20));
  CHECK(l.certified);
  CHECK(l.increments.size() >= 3);
  for (double inc : l.increments) CHECK(inc >= 0.3);
  CHECK_THROWS_AS(nk_ladder(0.4, 0.3, ThickSet::from_generator("evens", 8)), PrefixTooShort);
}

TEST_CASE("sub-Gaussian constants") {
  const SubGaussianConstants k1 = subgaussian_constants(1.0);
  const double g = 1.0 - std::pow(2.0, -0.5);
  CHECK(g == Approx(0.292893).epsilon(1e-6));
  CHECK(k1.c_o == Approx(2.0 / g).epsilon(1e-14));
  CHECK(k1.c_o == Approx(6.8284).epsilon(1e-5));
  CHECK(k1.c_c == Approx(g * g / 2.0).epsilon(1e-14));
  CHECK(k1.c_d == Approx(std::max(4.0, std::exp(k1.c_c * k1.c_o * k1.c_o))).epsilon(1e-14));
  for (double theta : {0.1, 0.5, 1.0}) {
    const SubGaussianConstants k = subgaussian_constants(theta);
    for (double x : {0.0, 0.5 * k.c_o, k.c_o}) CHECK(subgaussian_bound(k, x) >= 1.0 - 1e-12);
    double sum = 0.0;
    for (int i = 0; i < 2000; ++i) sum += chaining_weight(theta, i);
    CHECK(sum == Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(subgaussian_constants(0.0), DomainError);
  CHECK_THROWS_AS(subgaussian_constants(1.5), DomainError);
}

TEST_CASE("sub-Gaussian Monte Carlo config validation") {
  SubGaussianMcConfig c;
  c.theta = 0.75;
  c.process = SupProcess::brownian;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.process = SupProcess::fbm;
  c.hurst = 0.6;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.hurst = 0.8;
  CHECK_NOTHROW(c.validate());
  CHECK(sup_process_from_string(to_string(SupProcess::linear)) == SupProcess::linear);
}

TEST_CASE("bounds reports pass on small instances") {
  CHECK(matrix_lemma_report({4, 8}, {0.05}, 50, 1).passed());
  CHECK(coding_bound_report(3, 3, 8).passed());
}
