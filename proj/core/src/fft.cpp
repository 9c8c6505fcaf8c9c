#include "fft.hpp"

#include <cstring>
#include <mutex>

#include <fftw3.h>

namespace fracdrift::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

ComplexFft::ComplexFft(std::size_t n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* buf = fftw_alloc_complex(n);
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_free(buf);
}

ComplexFft::~ComplexFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void ComplexFft::forward(std::vector<std::complex<double>>& data) const {
  auto* buf = fftw_alloc_complex(n_);
  std::memcpy(buf, data.data(), n_ * sizeof(fftw_complex));
  fftw_execute_dft(static_cast<fftw_plan>(plan_), buf, buf);
  for (std::size_t k = 0; k < n_; ++k) data[k] = {buf[k][0], buf[k][1]};
  fftw_free(buf);
}

RealConvolver::RealConvolver(const std::vector<double>& kernel, std::size_t max_signal) {
  n_ = next_pow2(kernel.size() + max_signal);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* r = fftw_alloc_real(n_);
    fftw_complex* c = fftw_alloc_complex(n_ / 2 + 1);
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), r, c, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
  }
  double* r = fftw_alloc_real(n_);
  fftw_complex* c = fftw_alloc_complex(n_ / 2 + 1);
  std::memset(r, 0, n_ * sizeof(double));
  std::memcpy(r, kernel.data(), kernel.size() * sizeof(double));
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), r, c);
  kernel_hat_.resize(n_ / 2 + 1);
  for (std::size_t k = 0; k <= n_ / 2; ++k) kernel_hat_[k] = {c[k][0] / n_, c[k][1] / n_};
  fftw_free(r);
  fftw_free(c);
}

RealConvolver::~RealConvolver() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void RealConvolver::convolve(const std::vector<double>& signal, std::vector<double>& out) const {
  double* r = fftw_alloc_real(n_);
  fftw_complex* c = fftw_alloc_complex(n_ / 2 + 1);
  std::memset(r, 0, n_ * sizeof(double));
  std::memcpy(r, signal.data(), std::min(signal.size(), n_) * sizeof(double));
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), r, c);
  for (std::size_t k = 0; k <= n_ / 2; ++k) {
    const std::complex<double> z = std::complex<double>(c[k][0], c[k][1]) * kernel_hat_[k];
    c[k][0] = z.real();
    c[k][1] = z.imag();
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), c, r);
  for (std::size_t k = 0; k < out.size() && k < n_; ++k) out[k] = r[k];
  fftw_free(r);
  fftw_free(c);
}

}  // namespace fracdrift::detail
