#include "fracdrift/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "fracdrift/errors.hpp"

namespace fracdrift {

double normal_upper_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_upper_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::complement(boost::math::normal(), p));
}

double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  if (successes > n) throw DomainError("wilson_interval: more successes than trials");
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double den = 1.0 + z2 / nn;
  const double centre = (ph + z2 / (2.0 * nn)) / den;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / den;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double bonferroni_threshold(std::size_t m, double alpha, double floor) {
  if (m == 0) return floor;
  return std::max(floor, normal_upper_quantile(alpha / (2.0 * static_cast<double>(m))));
}

void Moments::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Moments::merge(const Moments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_), n = na + nb;
  const double d = o.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += o.m2_ + d * d * na * nb / n;
  n_ += o.n_;
}

double Moments::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double Moments::std_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

SecondMoments::SecondMoments(std::size_t dim) : dim_(dim), sum_(dim * (dim + 1) / 2, 0.0) {}

void SecondMoments::add(std::span<const double> x) {
  if (x.size() != dim_) throw DomainError("SecondMoments: dimension mismatch");
  ++n_;
  double* s = sum_.data();
  for (std::size_t i = 0; i < dim_; ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j <= i; ++j) *s++ += xi * x[j];
  }
}

void SecondMoments::merge(const SecondMoments& o) {
  if (o.dim_ != dim_) throw DomainError("SecondMoments: dimension mismatch");
  n_ += o.n_;
  for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] += o.sum_[k];
}

Eigen::MatrixXd SecondMoments::covariance() const {
  Eigen::MatrixXd c(dim_, dim_);
  const double inv = n_ > 0 ? 1.0 / static_cast<double>(n_) : 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j <= i; ++j) c(i, j) = c(j, i) = sum_[k++] * inv;
  return c;
}

Eigen::MatrixXd SecondMoments::std_errors() const {
  const Eigen::MatrixXd c = covariance();
  Eigen::MatrixXd se(dim_, dim_);
  const double nn = std::max<double>(1.0, static_cast<double>(n_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) se(i, j) = std::sqrt((c(i, i) * c(j, j) + c(i, j) * c(i, j)) / nn);
  return se;
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DomainError("quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

Interval median_interval(std::vector<double> x, double z) {
  if (x.empty()) throw DomainError("median_interval: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double half = 0.5 * z * std::sqrt(n);
  const auto lo = static_cast<long>(std::floor(0.5 * n - half));
  const auto hi = static_cast<long>(std::ceil(0.5 * n + half));
  const long last = static_cast<long>(x.size()) - 1;
  return {x[static_cast<std::size_t>(std::clamp(lo, 0L, last))], x[static_cast<std::size_t>(std::clamp(hi, 0L, last))]};
}

}  // namespace fracdrift
