#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracdrift/errors.hpp"

namespace fracdrift {

// Quasi-one functions of the almost-diagonal matrix lemma, in closed form. A value is +inf
// outside the radius of the series it sums.
//   phi_m: 2 phi_m eps^2 = 2 eps^2 + sum_{m>=2} (2m-1) (2 eps)^{2m}          (4 eps^2 < 1)
//   phi_g: phi_m + eps^{-2} sum_{k>=3} w^k / k, w = 2 eps / (1 - eps)        (eps < 1/3)
//   phi_n: Phi_n(x) = e^{2x} + 4ex / (1 - 4ex) at x = 4 eps^2               (4 e x < 1)
//   phi_h: Phi_n(4 eps^2)
//   phi_i: diagonal analogue, 2 phi_i eps^2 bounds |b_ii - 1| (see phi_functions)
//   phi_j: exp(phi_g eps^2)
//   phi_k: (1 - 2 phi_i eps^2 - u / (1 - u))_+^{-1}, u = 2 phi_h eps          (u < 1)
struct PhiFunctions {
  double eps = 0.0;
  double phi_m = 0.0;
  double phi_g = 0.0;
  double phi_h = 0.0;
  double phi_i = 0.0;
  double phi_n = 0.0;
  double phi_j = 0.0;
  double phi_k = 0.0;

  bool all_finite() const;
};

double phi_n(double x);
PhiFunctions phi_functions(double eps);

// One entry of A that breaks |a_ij| <= eps^{|i-j|} or a_ii = 1.
struct HypothesisViolation {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
  double limit = 0.0;
};

class HypothesisError : public DomainError {
 public:
  HypothesisError(const std::string& what, std::vector<HypothesisViolation> entries)
      : DomainError(what), entries_(std::move(entries)) {}
  const std::vector<HypothesisViolation>& entries() const noexcept { return entries_; }

 private:
  std::vector<HypothesisViolation> entries_;
};

// Margins are rhs - lhs of each inequality (negative means violated); the checks allow
// `slack` of absolute roundoff.
struct MatrixBoundsReport {
  std::size_t n = 0;
  double eps = 0.0;
  double det = 0.0;
  double det_bound = 0.0;        // exp(-n phi_g eps^2)
  double det_margin = 0.0;
  double offdiag_margin = 0.0;   // min over i != j of 2^{|i-j|-1} (phi_h eps)^{|i-j|} - |b_ij|
  double diag_margin = 0.0;      // min over i of 2 phi_i eps^2 - |b_ii - 1|
  double norm_h = 0.0;           // column-sum norm of I - A
  double norm_bound = 0.0;       // 2 eps / (1 - eps)
  bool det_ok = false;
  bool inverse_ok = false;       // off-diagonal and diagonal inverse bounds
  bool norm_ok = false;

  bool ok() const { return det_ok && inverse_ok && norm_ok; }
};

// Throws HypothesisError when A is not an admissible eps-almost-diagonal matrix, DomainError
// when some phi function is infinite at eps.
void check_hypothesis(const Eigen::MatrixXd& A, double eps, double tol = 1e-12);
MatrixBoundsReport matrix_bounds_check(const Eigen::MatrixXd& A, double eps, double slack = 1e-9);

enum class AdversarialKind { all_positive, alternating, all_negative };

// a_ij uniform in [-eps^{|i-j|}, eps^{|i-j|}], unit diagonal.
Eigen::MatrixXd random_almost_diagonal(std::size_t n, double eps, std::uint64_t seed, std::uint64_t index);
// a_ij = eps^{|i-j|}, (-1)^{i-j} eps^{|i-j|} or -eps^{|i-j|} off the diagonal.
Eigen::MatrixXd adversarial_almost_diagonal(std::size_t n, double eps, AdversarialKind kind);

struct MatrixBatchSummary {
  std::size_t n = 0;
  double eps = 0.0;
  std::size_t trials = 0;
  std::size_t det_violations = 0;
  std::size_t offdiag_violations = 0;
  std::size_t diag_violations = 0;
  std::size_t norm_violations = 0;
  double min_det_margin = 0.0;
  double min_offdiag_margin = 0.0;
  double min_diag_margin = 0.0;

  std::size_t violations() const { return det_violations + offdiag_violations + diag_violations + norm_violations; }
};

// `trials` random instances plus the three adversarial ones, in parallel over instances.
MatrixBatchSummary matrix_bounds_batch(std::size_t n, double eps, std::size_t trials, std::uint64_t seed,
                                       unsigned threads = 0);

// Truncated series sum_{m=0}^{m_max} C(|z|+2m, m) C(|z|+2m-1, k-1) eps^{|z|+2m} bounding the
// entries of the k-th power of H on the |i - j| = z diagonal.
double hk_entry_bound(long z, unsigned k, double eps, unsigned m_max);

}  // namespace fracdrift
