#include "fracdrift/matrix_lemma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/binomial.hpp>

#include "fracdrift/parallel.hpp"
#include "fracdrift/rng.hpp"

namespace fracdrift {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sum_{m>=2} (2m-1) y^m = 2y/(1-y)^2 - 1/(1-y) + 1 - y for y < 1, written with the
// leading y^2 factored out to avoid cancellation at small y.
double odd_weighted_tail(double y) {
  if (!(y < 1.0)) return kInf;
  const double q = 1.0 - y;
  return y * y * (3.0 - y) / (q * q);
}

// sum_{k>=3} w^k / k = -log(1-w) - w - w^2/2 for w < 1.
double log_tail(double w) {
  if (!(w < 1.0)) return kInf;
  if (w < 1e-3) return w * w * w * (1.0 / 3.0 + w * (0.25 + w * (0.2 + w / 6.0)));
  return -std::log1p(-w) - w - 0.5 * w * w;
}

}  // namespace

bool PhiFunctions::all_finite() const {
  return std::isfinite(phi_m) && std::isfinite(phi_g) && std::isfinite(phi_h) && std::isfinite(phi_i) &&
         std::isfinite(phi_n) && std::isfinite(phi_j) && std::isfinite(phi_k);
}

double phi_n(double x) {
  if (!(x >= 0.0)) throw DomainError("phi_n: x must be nonnegative");
  const double c = 4.0 * std::numbers::e * x;
  if (!(c < 1.0)) return kInf;
  return std::exp(2.0 * x) + c / (1.0 - c);
}

PhiFunctions phi_functions(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("phi_functions: eps must be positive and finite");
  PhiFunctions p;
  p.eps = eps;
  const double e2 = eps * eps;
  const double y = 4.0 * e2;

  p.phi_m = std::isfinite(odd_weighted_tail(y)) ? 1.0 + odd_weighted_tail(y) / (2.0 * e2) : kInf;

  const double w = eps < 1.0 ? 2.0 * eps / (1.0 - eps) : kInf;
  const double lt = log_tail(w);
  p.phi_g = std::isfinite(p.phi_m) && std::isfinite(lt) ? p.phi_m + lt / e2 : kInf;

  p.phi_n = phi_n(y);
  p.phi_h = p.phi_n;

  // Diagonal: |b_ii - 1| <= sum_{k>=2} |h^(k)_ii|. The k = 2 term is 2 phi_m eps^2; for k >= 3
  // the entry bound with z = 0 summed over k = 3..2m gives
  //   sum_{m>=1} C(2m, m) (2^{2m-1} - 2m) eps^{2m}
  //   = 1/2 [(1 - 16 eps^2)^{-1/2} - 1 - 8 eps^2] - 4 eps^2 [(1 - 4 eps^2)^{-3/2} - 1],
  // using sum_m C(2m, m) x^m = (1 - 4x)^{-1/2} and sum_m m C(2m, m) x^m = 2x (1 - 4x)^{-3/2}.
  // Both brackets are O(eps^4), so 2 phi_i eps^2 = 2 phi_m eps^2 + that, valid for eps < 1/4.
  if (16.0 * e2 < 1.0 && std::isfinite(p.phi_m)) {
    const double a = 0.5 * std::expm1(-0.5 * std::log1p(-16.0 * e2)) - 4.0 * e2;
    const double b = 4.0 * e2 * std::expm1(-1.5 * std::log1p(-4.0 * e2));
    p.phi_i = p.phi_m + (a - b) / (2.0 * e2);
  } else {
    p.phi_i = kInf;
  }

  p.phi_j = std::isfinite(p.phi_g) ? std::exp(p.phi_g * e2) : kInf;

  const double u = 2.0 * p.phi_h * eps;
  if (std::isfinite(p.phi_i) && u < 1.0) {
    const double d = 1.0 - 2.0 * p.phi_i * e2 - u / (1.0 - u);
    p.phi_k = d > 0.0 ? 1.0 / d : kInf;
  } else {
    p.phi_k = kInf;
  }
  return p;
}

void check_hypothesis(const Eigen::MatrixXd& A, double eps, double tol) {
  if (A.rows() != A.cols() || A.rows() == 0) throw DomainError("matrix_bounds_check: A must be square and nonempty");
  if (!(eps > 0.0)) throw DomainError("matrix_bounds_check: eps must be positive");
  std::vector<HypothesisViolation> bad;
  const auto n = static_cast<std::size_t>(A.rows());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = A(i, j);
      if (i == j) {
        if (!(std::abs(a - 1.0) <= tol)) bad.push_back({i, j, a, 1.0});
      } else {
        const double lim = std::pow(eps, static_cast<double>(i > j ? i - j : j - i));
        if (!(std::abs(a) <= lim * (1.0 + tol))) bad.push_back({i, j, a, lim});
      }
    }
  if (!bad.empty()) {
    std::string msg = "matrix_bounds_check: A violates a_ii = 1, |a_ij| <= eps^|i-j| at";
    for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 8); ++k)
      msg += " (" + std::to_string(bad[k].i) + "," + std::to_string(bad[k].j) + ")";
    if (bad.size() > 8) msg += " and " + std::to_string(bad.size() - 8) + " more";
    throw HypothesisError(msg, std::move(bad));
  }
}

MatrixBoundsReport matrix_bounds_check(const Eigen::MatrixXd& A, double eps, double slack) {
  check_hypothesis(A, eps);
  const PhiFunctions phi = phi_functions(eps);
  if (!std::isfinite(phi.phi_g) || !std::isfinite(phi.phi_h) || !std::isfinite(phi.phi_i))
    throw DomainError("matrix_bounds_check: phi functions are infinite at this eps (need eps < 1/4)");

  MatrixBoundsReport r;
  const auto n = static_cast<std::size_t>(A.rows());
  r.n = n;
  r.eps = eps;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  r.det = lu.determinant();
  r.det_bound = std::exp(-static_cast<double>(n) * phi.phi_g * eps * eps);
  r.det_margin = r.det - r.det_bound;
  r.det_ok = r.det_margin >= -slack;

  const Eigen::MatrixXd B = lu.inverse();
  r.offdiag_margin = kInf;
  r.diag_margin = kInf;
  const double base = phi.phi_h * eps;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        r.diag_margin = std::min(r.diag_margin, 2.0 * phi.phi_i * eps * eps - std::abs(B(i, i) - 1.0));
      } else {
        const double d = static_cast<double>(i > j ? i - j : j - i);
        const double bound = std::exp2(d - 1.0) * std::pow(base, d);
        r.offdiag_margin = std::min(r.offdiag_margin, bound - std::abs(B(i, j)));
      }
    }
  if (n == 1) r.offdiag_margin = 0.0;
  r.inverse_ok = r.offdiag_margin >= -slack && r.diag_margin >= -slack;

  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(A.rows(), A.cols()) - A;
  r.norm_h = H.cwiseAbs().colwise().sum().maxCoeff();
  r.norm_bound = 2.0 * eps / (1.0 - eps);
  r.norm_ok = r.norm_h <= r.norm_bound * (1.0 + 1e-12);
  return r;
}

Eigen::MatrixXd random_almost_diagonal(std::size_t n, double eps, std::uint64_t seed, std::uint64_t index) {
  RngStream rng = RngStream(seed, 0x6d61747269780000ULL).substream(index);
  Eigen::MatrixXd A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        A(i, j) = 1.0;
        continue;
      }
      const double lim = std::pow(eps, static_cast<double>(i > j ? i - j : j - i));
      A(i, j) = lim * (2.0 * rng.uniform() - 1.0);
    }
  return A;
}

Eigen::MatrixXd adversarial_almost_diagonal(std::size_t n, double eps, AdversarialKind kind) {
  Eigen::MatrixXd A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      double a = std::pow(eps, static_cast<double>(d));
      if (d > 0 && kind == AdversarialKind::all_negative) a = -a;
      if (d % 2 == 1 && kind == AdversarialKind::alternating) a = -a;
      A(i, j) = a;
    }
  return A;
}

namespace {

struct BatchAcc {
  MatrixBatchSummary s;
  BatchAcc() {
    s.min_det_margin = kInf;
    s.min_offdiag_margin = kInf;
    s.min_diag_margin = kInf;
  }
  void add(const MatrixBoundsReport& r) {
    ++s.trials;
    s.det_violations += !r.det_ok;
    s.offdiag_violations += r.offdiag_margin < -1e-9;
    s.diag_violations += r.diag_margin < -1e-9;
    s.norm_violations += !r.norm_ok;
    s.min_det_margin = std::min(s.min_det_margin, r.det_margin);
    s.min_offdiag_margin = std::min(s.min_offdiag_margin, r.offdiag_margin);
    s.min_diag_margin = std::min(s.min_diag_margin, r.diag_margin);
  }
  void merge(const BatchAcc& o) {
    s.trials += o.s.trials;
    s.det_violations += o.s.det_violations;
    s.offdiag_violations += o.s.offdiag_violations;
    s.diag_violations += o.s.diag_violations;
    s.norm_violations += o.s.norm_violations;
    s.min_det_margin = std::min(s.min_det_margin, o.s.min_det_margin);
    s.min_offdiag_margin = std::min(s.min_offdiag_margin, o.s.min_offdiag_margin);
    s.min_diag_margin = std::min(s.min_diag_margin, o.s.min_diag_margin);
  }
};

}  // namespace

MatrixBatchSummary matrix_bounds_batch(std::size_t n, double eps, std::size_t trials, std::uint64_t seed,
                                       unsigned threads) {
  if (n == 0) throw DomainError("matrix_bounds_batch: n must be positive");
  constexpr AdversarialKind kinds[] = {AdversarialKind::all_positive, AdversarialKind::alternating,
                                       AdversarialKind::all_negative};
  BatchAcc acc = chunked_reduce(trials + 3, 16, threads, [] { return BatchAcc{}; },
                                [&](BatchAcc& a, std::size_t k) {
                                  const Eigen::MatrixXd A = k < trials
                                                                ? random_almost_diagonal(n, eps, seed, k)
                                                                : adversarial_almost_diagonal(n, eps, kinds[k - trials]);
                                  a.add(matrix_bounds_check(A, eps));
                                });
  acc.s.n = n;
  acc.s.eps = eps;
  return acc.s;
}

double hk_entry_bound(long z, unsigned k, double eps, unsigned m_max) {
  if (k == 0) throw DomainError("hk_entry_bound: k must be at least 1");
  if (!(eps > 0.0)) throw DomainError("hk_entry_bound: eps must be positive");
  const unsigned az = static_cast<unsigned>(z < 0 ? -z : z);
  double sum = 0.0;
  for (unsigned m = 0; m <= m_max; ++m) {
    const unsigned len = az + 2 * m;
    if (len == 0 || len < k) continue;  // C(len - 1, k - 1) = 0
    const double c1 = boost::math::binomial_coefficient<double>(len, m);
    const double c2 = boost::math::binomial_coefficient<double>(len - 1, k - 1);
    sum += c1 * c2 * std::pow(eps, static_cast<double>(len));
  }
  return sum;
}

}  // namespace fracdrift
