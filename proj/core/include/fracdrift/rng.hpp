#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fracdrift {

// Philox4x32-10 counter-based generator. A stream is (seed, stream id); draws advance a
// 64-bit counter, so any path can be regenerated from (seed, stream) alone.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Independent child stream, e.g. one per Monte Carlo path.
  RngStream substream(std::uint64_t k) const;

  std::array<std::uint32_t, 4> next_block();
  double uniform();  // in (0, 1), 53 random bits
  double normal();
  void fill_normal(std::span<double> out);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

}  // namespace fracdrift
