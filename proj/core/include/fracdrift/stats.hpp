#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fracdrift {

// Upper quantile: Pr(N(0,1) > z) = p.
double normal_upper_quantile(double p);
// Pr(N(0,1) >= x).
double normal_tail(double x);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054);

// Two-sided normal threshold controlling the familywise error of m tests at level alpha,
// never below `floor`.
double bonferroni_threshold(std::size_t m, double alpha = 1e-3, double floor = 4.0);

// Scalar mean and variance (Chan et al. merge).
class Moments {
 public:
  void add(double x);
  void merge(const Moments& o);
  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Raw second moments E[x x^T] of a centred vector (known zero mean) and the
// Gaussian standard errors of each entry, sqrt((C_ii C_jj + C_ij^2) / n).
class SecondMoments {
 public:
  explicit SecondMoments(std::size_t dim = 0);
  void add(std::span<const double> x);
  void merge(const SecondMoments& o);
  std::uint64_t count() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  Eigen::MatrixXd covariance() const;
  Eigen::MatrixXd std_errors() const;

 private:
  std::size_t dim_;
  std::uint64_t n_ = 0;
  std::vector<double> sum_;  // packed lower triangle, row i at offset i (i + 1) / 2
};

// Order statistic helpers on a copy of the data.
double median(std::vector<double> x);
double quantile(std::vector<double> x, double q);

// Distribution-free interval for the median from the binomial order statistics.
Interval median_interval(std::vector<double> x, double z = 1.959963984540054);

}  // namespace fracdrift
