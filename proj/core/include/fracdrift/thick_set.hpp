#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fracdrift {

// A subset of N known on the finite prefix {0, ..., N-1}, optionally with the generator
// that produced it. Thickness can only be judged as a trend on such a prefix.
class ThickSet {
 public:
  ThickSet() = default;
  explicit ThickSet(std::vector<bool> prefix, std::string description = {});

  static ThickSet from_predicate(std::size_t N, const std::function<bool(std::uint64_t)>& member,
                                 std::string description);
  // Named generators: naturals, evens, odds, squares, multiples:K, residue:K:L,
  // blocks (the union of [4^j, 2 * 4^j)), bernoulli:P:SEED.
  static ThickSet from_generator(const std::string& spec, std::size_t N);

  std::size_t size() const noexcept { return member_.size(); }
  bool contains(std::size_t i) const { return member_.at(i); }
  // |I ∩ [n)| for n <= size().
  std::size_t count_below(std::size_t n) const;
  const std::string& description() const noexcept { return description_; }
  std::vector<std::size_t> elements() const;

  // Regenerates the prefix from the description and compares; true when there is no generator.
  bool consistent_with_generator() const;

 private:
  std::vector<bool> member_;
  std::vector<std::uint32_t> cum_;  // cum_[n] = |I ∩ [n)|
  std::string description_;
};

// |I ∩ [n)| / n, for 1 <= n <= size().
double upper_density(const ThickSet& s, std::size_t n);

struct DensityTrend {
  std::vector<std::size_t> ladder;  // 1, 2, 4, ..., and the prefix length
  std::vector<double> density;
  std::vector<double> tail_sup;     // max of density over ladder points at or beyond each n
  double log_slope = 0.0;           // slope of log tail_sup against log n on the upper half
  bool looks_thick = false;         // tail_sup stays away from 0: log_slope > -0.25
};

DensityTrend is_thick_estimate(const ThickSet& s);

struct ResidueSplit {
  std::size_t k = 0;
  std::size_t n = 0;
  double density = 0.0;               // density of I on [n)
  std::vector<ThickSet> classes;      // J_l = {j | jk + l in I} on [ceil((n - l) / k))
  std::vector<double> class_density;
  std::size_t argmax = 0;
  double mean_class_density = 0.0;    // (1/k) sum_l density(J_l)
  double slack = 0.0;                 // mean_class_density + k / n - density, >= 0
};

ResidueSplit residue_class_split(const ThickSet& s, std::size_t k);

// sum_{i in I, 1 <= i < n} 1/i.
double harmonic_subsum(const ThickSet& s, std::size_t n);

struct NkLadder {
  double p_hi = 0.0, p_lo = 0.0;
  std::vector<std::size_t> n;          // n_0 = 1, n_1, ...
  std::vector<double> increments;      // sum over I ∩ [n_k, n_{k+1}) of 1/i
  bool certified = false;              // every increment >= p_lo
};

// n_{k+1} = smallest n >= n_k / (p_hi - p_lo) with |I ∩ [n)| >= p_hi n, while one exists in
// the prefix. Throws PrefixTooShort when fewer than 3 blocks complete.
NkLadder nk_ladder(double p_hi, double p_lo, const ThickSet& s);

}  // namespace fracdrift
