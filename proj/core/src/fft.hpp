#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fracdrift::detail {

// Thin wrappers over FFTW. Plans are created under a global lock with FFTW_ESTIMATE
// (deterministic algorithm choice) and executed on caller-owned buffers.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t n);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  // Forward unnormalized DFT, in place.
  void forward(std::vector<std::complex<double>>& data) const;

 private:
  std::size_t n_;
  void* plan_;
};

// Linear convolution of real sequences via real FFTs, with a fixed kernel.
class RealConvolver {
 public:
  RealConvolver(const std::vector<double>& kernel, std::size_t max_signal);
  ~RealConvolver();
  RealConvolver(const RealConvolver&) = delete;
  RealConvolver& operator=(const RealConvolver&) = delete;

  // out[k] = sum_j signal[j] kernel[k - j] for k < out.size().
  void convolve(const std::vector<double>& signal, std::vector<double>& out) const;

 private:
  std::size_t n_;
  std::vector<std::complex<double>> kernel_hat_;
  void* fwd_;
  void* inv_;
};

}  // namespace fracdrift::detail
