#include "fracdrift/thick_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracdrift/errors.hpp"
#include "fracdrift/rng.hpp"

namespace fracdrift {

ThickSet::ThickSet(std::vector<bool> prefix, std::string description)
    : member_(std::move(prefix)), description_(std::move(description)) {
  if (member_.size() >= 0xffffffffULL) throw DomainError("ThickSet: prefix too long");
  cum_.assign(member_.size() + 1, 0);
  for (std::size_t i = 0; i < member_.size(); ++i) cum_[i + 1] = cum_[i] + (member_[i] ? 1 : 0);
}

ThickSet ThickSet::from_predicate(std::size_t N, const std::function<bool(std::uint64_t)>& member,
                                  std::string description) {
  std::vector<bool> v(N);
  for (std::size_t i = 0; i < N; ++i) v[i] = member(i);
  return ThickSet(std::move(v), std::move(description));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::uint64_t parse_uint(const std::string& s, const std::string& spec) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw DomainError("thick set '" + spec + "': expected an integer, got '" + s + "'");
  return v;
}

}  // namespace

ThickSet ThickSet::from_generator(const std::string& spec, std::size_t N) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw DomainError("thick set: empty generator");
  const std::string& kind = parts[0];
  auto arity = [&](std::size_t n) {
    if (parts.size() != n + 1)
      throw DomainError("thick set '" + spec + "': expected " + std::to_string(n) + " parameter(s)");
  };
  if (kind == "naturals") {
    arity(0);
    return from_predicate(N, [](std::uint64_t) { return true; }, spec);
  }
  if (kind == "evens" || kind == "odds") {
    arity(0);
    const std::uint64_t r = kind == "odds";
    return from_predicate(N, [r](std::uint64_t i) { return i % 2 == r; }, spec);
  }
  if (kind == "squares") {
    arity(0);
    std::vector<bool> v(N, false);
    for (std::size_t j = 0; j * j < N; ++j) v[j * j] = true;
    return ThickSet(std::move(v), spec);
  }
  if (kind == "multiples" || kind == "residue") {
    arity(kind == "multiples" ? 1 : 2);
    const std::uint64_t k = parse_uint(parts[1], spec);
    const std::uint64_t l = kind == "residue" ? parse_uint(parts[2], spec) : 0;
    if (k == 0 || l >= k) throw DomainError("thick set '" + spec + "': need K >= 1 and 0 <= L < K");
    return from_predicate(N, [k, l](std::uint64_t i) { return i % k == l; }, spec);
  }
  if (kind == "blocks") {
    arity(0);
    return from_predicate(
        N,
        [](std::uint64_t i) {
          for (std::uint64_t a = 1; a <= i; a *= 4)
            if (i < 2 * a) return true;
          return false;
        },
        spec);
  }
  if (kind == "bernoulli") {
    arity(2);
    const double p = std::stod(parts[1]);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("thick set '" + spec + "': P must lie in [0, 1]");
    RngStream rng(parse_uint(parts[2], spec), 0x746869636bULL);
    std::vector<bool> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = rng.uniform() < p;
    return ThickSet(std::move(v), spec);
  }
  throw DomainError("thick set: unknown generator '" + kind + "'");
}

std::size_t ThickSet::count_below(std::size_t n) const {
  if (n > member_.size()) throw DomainError("ThickSet::count_below: n beyond the prefix");
  return cum_[n];
}

std::vector<std::size_t> ThickSet::elements() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < member_.size(); ++i)
    if (member_[i]) out.push_back(i);
  return out;
}

bool ThickSet::consistent_with_generator() const {
  if (description_.empty()) return true;
  try {
    return from_generator(description_, member_.size()).member_ == member_;
  } catch (const DomainError&) {
    return true;  // free-form description, nothing to regenerate
  }
}

double upper_density(const ThickSet& s, std::size_t n) {
  if (n == 0 || n > s.size()) throw DomainError("upper_density: need 1 <= n <= prefix length");
  return static_cast<double>(s.count_below(n)) / static_cast<double>(n);
}

DensityTrend is_thick_estimate(const ThickSet& s) {
  if (s.size() == 0) throw DomainError("is_thick_estimate: empty prefix");
  DensityTrend t;
  for (std::size_t n = 1; n <= s.size(); n *= 2) t.ladder.push_back(n);
  if (t.ladder.back() != s.size()) t.ladder.push_back(s.size());
  for (std::size_t n : t.ladder) t.density.push_back(upper_density(s, n));
  t.tail_sup.resize(t.density.size());
  double m = 0.0;
  for (std::size_t k = t.density.size(); k-- > 0;) {
    m = std::max(m, t.density[k]);
    t.tail_sup[k] = m;
  }
  // Least squares on the upper half of the ladder; an empty tail counts as decaying.
  const std::size_t lo = t.ladder.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  bool zero = false;
  for (std::size_t k = lo; k < t.ladder.size(); ++k) {
    if (t.tail_sup[k] <= 0.0) {
      zero = true;
      break;
    }
    const double x = std::log(static_cast<double>(t.ladder[k]));
    const double y = std::log(t.tail_sup[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (zero) {
    t.log_slope = -std::numeric_limits<double>::infinity();
  } else if (cnt >= 2) {
    const double c = static_cast<double>(cnt);
    t.log_slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
  }
  t.looks_thick = t.log_slope > -0.25;
  return t;
}

ResidueSplit residue_class_split(const ThickSet& s, std::size_t k) {
  if (k < 2) throw DomainError("residue_class_split: k must be at least 2");
  const std::size_t n = s.size();
  if (n < k) throw PrefixTooShort("residue_class_split: prefix shorter than k");
  ResidueSplit r;
  r.k = k;
  r.n = n;
  r.density = upper_density(s, n);
  double best = -1.0;
  for (std::size_t l = 0; l < k; ++l) {
    const std::size_t len = (n - l + k - 1) / k;
    std::vector<bool> v(len);
    for (std::size_t j = 0; j < len; ++j) v[j] = s.contains(j * k + l);
    ThickSet J(std::move(v), "residue class " + std::to_string(l) + " mod " + std::to_string(k) + " of " +
                                 (s.description().empty() ? std::string("I") : s.description()));
    const double d = upper_density(J, len);
    r.class_density.push_back(d);
    r.mean_class_density += d / static_cast<double>(k);
    if (d > best) {
      best = d;
      r.argmax = l;
    }
    r.classes.push_back(std::move(J));
  }
  r.slack = r.mean_class_density + static_cast<double>(k) / static_cast<double>(n) - r.density;
  return r;
}

double harmonic_subsum(const ThickSet& s, std::size_t n) {
  if (n > s.size()) throw DomainError("harmonic_subsum: n beyond the prefix");
  long double sum = 0.0L;
  for (std::size_t i = 1; i < n; ++i)
    if (s.contains(i)) sum += 1.0L / static_cast<long double>(i);
  return static_cast<double>(sum);
}

NkLadder nk_ladder(double p_hi, double p_lo, const ThickSet& s) {
  if (!(p_lo > 0.0 && p_lo < p_hi && p_hi <= 1.0)) throw DomainError("nk_ladder: need 0 < p_lo < p_hi <= 1");
  NkLadder l;
  l.p_hi = p_hi;
  l.p_lo = p_lo;
  l.n.push_back(1);
  const double step = 1.0 / (p_hi - p_lo);
  for (;;) {
    const double lower = std::ceil(static_cast<double>(l.n.back()) * step);
    std::size_t m = static_cast<std::size_t>(lower);
    while (m <= s.size() && static_cast<double>(s.count_below(m)) < p_hi * static_cast<double>(m)) ++m;
    if (m > s.size()) break;
    long double inc = 0.0L;
    for (std::size_t i = l.n.back(); i < m; ++i)
      if (s.contains(i)) inc += 1.0L / static_cast<long double>(i);
    l.n.push_back(m);
    l.increments.push_back(static_cast<double>(inc));
  }
  if (l.increments.size() < 3)
    throw PrefixTooShort("nk_ladder: only " + std::to_string(l.increments.size()) +
                         " block(s) fit in the prefix, need 3; use a longer prefix or a smaller p_hi");
  l.certified = std::all_of(l.increments.begin(), l.increments.end(), [p_lo](double x) { return x >= p_lo; });
  return l;
}

}  // namespace fracdrift
