#include "fracdrift/cov_matrix.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fracdrift/errors.hpp"

namespace fracdrift {

CovMatrix::CovMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  const Eigen::Index n = entries_.rows();
  if (n == 0 || entries_.cols() != n) throw DomainError("CovMatrix: entries must be a non-empty square matrix");
  if (!entries_.allFinite()) throw DomainError("CovMatrix: entries contain NaN or Inf");
  // Exact symmetry: keep the lower triangle.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) entries_(j, i) = entries_(i, j);

  Eigen::LLT<Eigen::MatrixXd> llt(entries_);
  if (llt.info() == Eigen::Success) {
    chol_ = llt.matrixL();
    pack();
    return;
  }
  const double base = 1e-12 * std::abs(entries_.trace()) / static_cast<double>(n);
  double jit = base > 0.0 ? base : 1e-300;
  for (int attempt = 0; attempt < 7; ++attempt, jit *= 10.0) {
    Eigen::MatrixXd m = entries_;
    m.diagonal().array() += jit;
    Eigen::LLT<Eigen::MatrixXd> l2(m);
    if (l2.info() == Eigen::Success) {
      chol_ = l2.matrixL();
      jitter_ = jit;
      pack();
      return;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
  throw NumericError("CovMatrix: Cholesky failed after jitter (dim " + std::to_string(n) +
                     ", smallest eigenvalue " + std::to_string(es.eigenvalues()(0)) + ", largest " +
                     std::to_string(es.eigenvalues()(n - 1)) + ")");
}

double CovMatrix::reconstruction_error() const {
  const Eigen::MatrixXd r = chol_ * chol_.transpose() - entries_;
  const double den = entries_.norm();
  return den > 0.0 ? r.norm() / den : r.norm();
}

void CovMatrix::pack() {
  const Eigen::Index n = chol_.rows();
  packed_.resize(static_cast<std::size_t>(n * (n + 1) / 2));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) packed_[k++] = chol_(i, j);
}

void CovMatrix::apply_factor(std::span<const double> g, std::span<double> out) const {
  const std::size_t n = dim();
  const double* row = packed_.data();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += row[j] * g[j];
    out[i] = s;
    row += i + 1;
  }
}

void CovMatrix::sample(RngStream& rng, std::span<double> out) const {
  std::vector<double> g(dim());
  rng.fill_normal(g);
  apply_factor(g, out);
}

Eigen::VectorXd CovMatrix::solve(const Eigen::VectorXd& b) const {
  const auto L = chol_.triangularView<Eigen::Lower>();
  Eigen::VectorXd y = L.solve(b);
  return L.transpose().solve(y);
}

}  // namespace fracdrift
