#include "fracdrift/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "fft.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/xi.hpp"

namespace fracdrift {

double fbm_cov(const HurstContext& ctx, double s, double t) {
  const double h2 = 2.0 * ctx.H;
  auto p = [h2](double x) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), h2); };
  return 0.5 * (p(s) + p(t) - p(t - s));
}

double fgn_autocov(const HurstContext& ctx, double dt, long k) {
  const double h2 = 2.0 * ctx.H;
  const double a = std::abs(static_cast<double>(k));
  auto p = [h2](double x) { return x == 0.0 ? 0.0 : std::pow(x, h2); };
  return 0.5 * std::pow(dt, h2) * (p(a + 1.0) - 2.0 * p(a) + p(std::abs(a - 1.0)));
}

namespace {

// int_0^m x^eta (x + d)^eta dx.
double levy_kernel_integral(double eta, double m, double d, const QuadratureSpec& spec) {
  if (m <= 0.0) return 0.0;
  if (d == 0.0) return std::pow(m, 2.0 * eta + 1.0) / (2.0 * eta + 1.0);
  auto f = [eta, d](double x) { return std::pow(x, eta) * std::pow(x + d, eta); };
  QuadResult r;
  if (m <= d) {
    r = quad::graded(f, 0.0, m, Endpoint::left, spec);
  } else {
    r = quad::graded(f, 0.0, d, Endpoint::left, spec);
    const int extra = static_cast<int>(std::ceil(std::max(0.0, std::log2(m / d) - 30.0)));
    r += quad::graded(f, d, m, Endpoint::left, spec, extra);
  }
  return quad::checked(r, spec, "levy_cov").value;
}

}  // namespace

double levy_cov(const HurstContext& ctx, double s, double t, const QuadratureSpec& spec) {
  if (s < 0.0 || t < 0.0) throw DomainError("levy_cov: times must be nonnegative");
  const double m = std::min(s, t), d = std::abs(t - s);
  return ctx.c1 * ctx.c1 * levy_kernel_integral(ctx.eta, m, d, spec);
}

Eigen::MatrixXd levy_cov_matrix(const HurstContext& ctx, std::size_t n, double dt, const QuadratureSpec& spec) {
  if (n == 0) throw DomainError("levy_cov_matrix: n must be positive");
  if (!(dt > 0.0)) throw DomainError("levy_cov_matrix: dt must be positive");
  // In units of dt: Cov(Y_i, Y_j) = c1^2 dt^{2H} sum_{k < min(i,j)} int_k^{k+1} x^eta (x + |i-j|)^eta dx.
  const double eta = ctx.eta;
  const std::size_t N = n;
  Eigen::MatrixXd panel(N, N);  // panel(k, d)
  for (std::size_t d = 0; d < N; ++d) {
    auto f = [eta, d](double x) { return std::pow(x, eta) * std::pow(x + static_cast<double>(d), eta); };
    panel(0, d) = quad::graded(f, 0.0, 1.0, Endpoint::left, spec).value;
    for (std::size_t k = 1; k < N; ++k)
      panel(k, d) = quad::panel(f, static_cast<double>(k), static_cast<double>(k + 1), spec.order);
  }
  const double scale = ctx.c1 * ctx.c1 * std::pow(dt, 2.0 * ctx.H);
  Eigen::MatrixXd c(N, N);
  for (std::size_t d = 0; d < N; ++d) {
    double acc = 0.0;
    for (std::size_t m = 1; m + d <= N; ++m) {
      acc += panel(m - 1, d);
      c(m - 1, m - 1 + d) = c(m - 1 + d, m - 1) = scale * acc;
    }
  }
  return c;
}

struct FbmSampler::Circulant {
  std::size_t M;
  std::vector<double> sqrt_lambda;  // sqrt(lambda_k / M)
  detail::ComplexFft fft;
  explicit Circulant(std::size_t m) : M(m), sqrt_lambda(m), fft(m) {}
};

FbmSampler::FbmSampler(const HurstContext& ctx, std::size_t n, double dt, SampleMethod method)
    : ctx_(ctx), n_(n), dt_(dt), method_(method) {
  if (n == 0) throw DomainError("sample_fbm: n must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("sample_fbm: dt must be positive");
  std::string diag;
  if (method != SampleMethod::cholesky) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    const std::size_t M = 2 * m;
    auto circ = std::make_unique<Circulant>(M);
    std::vector<std::complex<double>> c(M);
    for (std::size_t k = 0; k <= m; ++k) c[k] = fgn_autocov(ctx, dt, static_cast<long>(k));
    for (std::size_t k = m + 1; k < M; ++k) c[k] = c[M - k];
    circ->fft.forward(c);
    double lmax = 0.0, lmin = 0.0;
    for (auto& z : c) {
      lmax = std::max(lmax, z.real());
      lmin = std::min(lmin, z.real());
    }
    min_ratio_ = lmax > 0.0 ? lmin / lmax : -1.0;
    if (lmin >= -1e-9 * lmax) {
      for (std::size_t k = 0; k < M; ++k) circ->sqrt_lambda[k] = std::sqrt(std::max(0.0, c[k].real()) / M);
      circ_ = std::move(circ);
      method_ = SampleMethod::circulant;
      return;
    }
    diag = "circulant embedding has eigenvalue ratio " + std::to_string(min_ratio_);
    if (method == SampleMethod::circulant) throw NumericError("sample_fbm: " + diag);
  }
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = fgn_autocov(ctx, dt, static_cast<long>(i) - static_cast<long>(j));
  try {
    chol_ = std::make_unique<CovMatrix>(std::move(cov));
  } catch (const NumericError& e) {
    throw NumericError("sample_fbm: " + (diag.empty() ? std::string() : diag + "; ") + e.what());
  }
  method_ = SampleMethod::cholesky;
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;

void FbmSampler::sample_increments(RngStream& rng, std::span<double> out) const {
  if (circ_) {
    const std::size_t M = circ_->M;
    std::vector<std::complex<double>> w(M);
    for (std::size_t k = 0; k < M; ++k) {
      const double a = rng.normal(), b = rng.normal();
      w[k] = circ_->sqrt_lambda[k] * std::complex<double>(a, b);
    }
    circ_->fft.forward(w);
    for (std::size_t k = 0; k < n_; ++k) out[k] = w[k].real();
  } else {
    chol_->sample(rng, out);
  }
}

GridPath FbmSampler::sample(RngStream& rng) const {
  GridPath p;
  p.t0 = 0.0;
  p.dt = dt_;
  p.kind = PathKind::fBm;
  p.values.assign(n_ + 1, 0.0);
  std::vector<double> inc(n_);
  sample_increments(rng, inc);
  for (std::size_t k = 0; k < n_; ++k) p.values[k + 1] = p.values[k] + inc[k];
  return p;
}

GridPath sample_fbm(const HurstContext& ctx, std::size_t n, double dt, RngStream& rng, SampleMethod method) {
  return FbmSampler(ctx, n, dt, method).sample(rng);
}

LevyFbmSampler::LevyFbmSampler(const HurstContext& ctx, std::size_t n, double dt, const QuadratureSpec& spec)
    : n_(n), dt_(dt), cov_(levy_cov_matrix(ctx, n, dt, spec)) {}

GridPath LevyFbmSampler::sample(RngStream& rng) const {
  GridPath p;
  p.t0 = 0.0;
  p.dt = dt_;
  p.kind = PathKind::LevyfBm;
  p.values.assign(n_ + 1, 0.0);
  cov_.sample(rng, std::span<double>(p.values).subspan(1));
  return p;
}

GridPath sample_levy_fbm(const HurstContext& ctx, std::size_t n, double dt, RngStream& rng,
                         const QuadratureSpec& spec) {
  return LevyFbmSampler(ctx, n, dt, spec).sample(rng);
}

BilateralPath split_bilateral(const GridPath& z, std::size_t n_past) {
  if (n_past >= z.size()) throw DomainError("split_bilateral: n_past must leave at least one future node");
  const std::size_t n = z.size() - 1;
  const double z0 = z.values[n_past];
  BilateralPath out;
  out.past.t0 = -static_cast<double>(n_past) * z.dt;
  out.past.dt = z.dt;
  out.past.kind = PathKind::fBm;
  out.future.t0 = 0.0;
  out.future.dt = z.dt;
  out.future.kind = PathKind::fBm;
  for (std::size_t k = 0; k <= n_past; ++k) out.past.values.push_back(z.values[k] - z0);
  for (std::size_t k = n_past; k <= n; ++k) out.future.values.push_back(z.values[k] - z0);
  out.past.values.back() = 0.0;
  out.future.values.front() = 0.0;
  return out;
}

BilateralPath sample_bilateral_fbm(const HurstContext& ctx, std::size_t n_past, std::size_t n_future, double dt,
                                   RngStream& rng) {
  if (n_future == 0) throw DomainError("sample_bilateral_fbm: need at least one future node");
  return split_bilateral(sample_fbm(ctx, n_past + n_future, dt, rng), n_past);
}

GridPath sample_obm(std::size_t n_past, std::size_t n_future, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw DomainError("sample_obm: dt must be positive");
  GridPath w;
  w.t0 = -static_cast<double>(n_past) * dt;
  w.dt = dt;
  w.kind = PathKind::oBm;
  w.values.assign(n_past + n_future + 1, 0.0);
  const double sd = std::sqrt(dt);
  for (std::size_t k = n_past; k-- > 0;) w.values[k] = w.values[k + 1] - sd * rng.normal();
  for (std::size_t k = n_past; k < n_past + n_future; ++k) w.values[k + 1] = w.values[k] + sd * rng.normal();
  return w;
}

}  // namespace fracdrift
