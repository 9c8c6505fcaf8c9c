#include "fracdrift/noise_functionals.hpp"

#include <algorithm>
#include <cmath>

#include "fracdrift/errors.hpp"
#include "fracdrift/quadrature.hpp"

namespace fracdrift {

NoiseFunctionals::NoiseFunctionals(std::vector<std::function<double(double)>> kernels, double t_end,
                                   std::vector<double> focal, const NoiseGrid& grid) {
  if (kernels.empty()) throw DomainError("NoiseFunctionals: no kernels");
  if (!(grid.rel_width > 0.0 && grid.rel_width < 1.0)) throw DomainError("NoiseFunctionals: rel_width must lie in (0, 1)");
  if (!(grid.min_width > 0.0) || !(grid.horizon > -t_end)) throw DomainError("NoiseFunctionals: bad grid");
  const double lo = -grid.horizon;
  std::vector<double> b{lo, t_end};
  const double g = 1.0 + grid.rel_width;
  for (double p : focal) {
    if (!(p > lo && p <= t_end)) throw DomainError("NoiseFunctionals: focal point outside the partition");
    b.push_back(p);
    for (double d = grid.min_width; p - d > lo; d *= g) b.push_back(p - d);
    for (double d = grid.min_width; p + d < t_end; d *= g) b.push_back(p + d);
  }
  std::sort(b.begin(), b.end());
  for (double x : b)
    if (breaks_.empty() || x - breaks_.back() > 0.5 * grid.min_width) breaks_.push_back(x);
  breaks_.back() = t_end;

  const std::size_t nc = breaks_.size() - 1;
  widths_.resize(nc);
  sd_.resize(nc);
  avg_.resize(static_cast<Eigen::Index>(kernels.size()), static_cast<Eigen::Index>(nc));
  const quad::Rule rule = quad::gauss_legendre(8);
  for (std::size_t c = 0; c < nc; ++c) {
    const double a = breaks_[c], w = breaks_[c + 1] - a;
    widths_[c] = w;
    sd_[c] = std::sqrt(w);
    for (std::size_t j = 0; j < kernels.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < rule.x.size(); ++k) s += rule.w[k] * kernels[j](a + 0.5 * w * (1.0 + rule.x[k]));
      avg_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = 0.5 * s;
    }
  }
}

void NoiseFunctionals::sample(RngStream& rng, std::span<double> out) const {
  if (out.size() != size()) throw DomainError("NoiseFunctionals: output size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const Eigen::Index m = avg_.rows();
  for (std::size_t c = 0; c < widths_.size(); ++c) {
    const double dw = sd_[c] * rng.normal();
    const double* col = avg_.data() + static_cast<Eigen::Index>(c) * m;
    for (Eigen::Index j = 0; j < m; ++j) out[static_cast<std::size_t>(j)] += col[j] * dw;
  }
}

Eigen::MatrixXd NoiseFunctionals::covariance() const {
  Eigen::MatrixXd scaled = avg_;
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) scaled.col(c) *= sd_[static_cast<std::size_t>(c)];
  return scaled * scaled.transpose();
}

}  // namespace fracdrift
