#include "fracdrift/word_coding.hpp"

#include <cstdlib>
#include <set>

#include "fracdrift/errors.hpp"

namespace fracdrift {
namespace {

BigInt binom(long n, long k) {
  if (n < 0 || k < 0 || k > n) return 0;
  BigInt c = 1;
  for (long i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

}  // namespace

BigInt valid_tuple_count(long z, unsigned k, unsigned n) {
  if (k > 64 || n > 4096) throw DomainError("valid_tuple_count: k or n too large");
  if (k == 0) return (z == 0 && n == 0) ? 1 : 0;
  const long span = static_cast<long>(n);
  if (std::labs(z) > span) return 0;
  // f[used][pos + span]: tuples of the current number of steps ending at pos with that length.
  const std::size_t width = static_cast<std::size_t>(2 * span + 1);
  std::vector<std::vector<BigInt>> f(n + 1, std::vector<BigInt>(width, 0));
  f[0][static_cast<std::size_t>(span)] = 1;
  for (unsigned step = 0; step < k; ++step) {
    std::vector<std::vector<BigInt>> g(n + 1, std::vector<BigInt>(width, 0));
    for (unsigned used = 0; used < n; ++used)
      for (std::size_t p = 0; p < width; ++p) {
        if (f[used][p] == 0) continue;
        for (unsigned len = 1; used + len <= n; ++len) {
          if (p + len < width) g[used + len][p + len] += f[used][p];
          if (p >= len) g[used + len][p - len] += f[used][p];
        }
      }
    f = std::move(g);
  }
  return f[n][static_cast<std::size_t>(z + span)];
}

BigInt coding_count_bound(long z, unsigned k, unsigned n) {
  const long az = std::labs(z);
  const long ln = static_cast<long>(n);
  if ((ln - az) % 2 != 0 || az > ln) return 0;
  return binom(ln, (ln - az) / 2) * binom(ln - 1, static_cast<long>(k) - 1);
}

std::string encode_tuple(const std::vector<long>& tuple) {
  if (tuple.empty() || tuple.front() != 0) throw DomainError("encode_tuple: tuple must start at 0");
  std::string w;
  for (std::size_t i = 1; i < tuple.size(); ++i) {
    const long d = tuple[i] - tuple[i - 1];
    if (d == 0) throw DomainError("encode_tuple: consecutive entries must differ");
    const char inner = d > 0 ? 'p' : 'm';
    const char last = d > 0 ? 'P' : 'M';
    w.append(static_cast<std::size_t>(std::labs(d) - 1), inner);
    w.push_back(last);
  }
  return w;
}

std::vector<long> decode_word(const std::string& word) {
  std::vector<long> t{0};
  long pos = 0, run = 0;
  char dir = 0;
  for (char c : word) {
    const char d = (c == 'p' || c == 'P') ? 'p' : (c == 'm' || c == 'M') ? 'm' : 0;
    if (d == 0) throw DomainError("decode_word: unknown symbol");
    if (run > 0 && d != dir) throw DomainError("decode_word: direction changes inside a move");
    dir = d;
    ++run;
    if (c == 'P' || c == 'M') {
      pos += d == 'p' ? run : -run;
      t.push_back(pos);
      run = 0;
    }
  }
  if (run != 0) throw DomainError("decode_word: word must end with a terminal symbol");
  return t;
}

std::vector<std::vector<long>> enumerate_valid_tuples(long z, unsigned k, unsigned n) {
  std::vector<std::vector<long>> out;
  if (k == 0) {
    if (z == 0 && n == 0) out.push_back({0});
    return out;
  }
  std::vector<long> cur{0};
  // Depth-first over signed steps with |step| <= remaining length.
  auto rec = [&](auto& self, unsigned left_steps, long left_len) -> void {
    if (left_steps == 0) {
      if (left_len == 0 && cur.back() == z) out.push_back(cur);
      return;
    }
    if (left_len < static_cast<long>(left_steps)) return;
    for (long s = -left_len; s <= left_len; ++s) {
      if (s == 0) continue;
      cur.push_back(cur.back() + s);
      self(self, left_steps - 1, left_len - std::labs(s));
      cur.pop_back();
    }
  };
  rec(rec, k, static_cast<long>(n));
  return out;
}

CodingCheckSummary verify_coding_bound(unsigned max_abs_z, unsigned max_k, unsigned max_n) {
  CodingCheckSummary s;
  s.max_abs_z = max_abs_z;
  s.max_k = max_k;
  s.max_n = max_n;
  const long zmax = static_cast<long>(max_abs_z);
  for (long z = -zmax; z <= zmax; ++z)
    for (unsigned k = 1; k <= max_k; ++k)
      for (unsigned n = 0; n <= max_n; ++n) {
        ++s.cases;
        const BigInt count = valid_tuple_count(z, k, n);
        const BigInt bound = coding_count_bound(z, k, n);
        if (count > bound) ++s.violations;
        else if (count == bound) ++s.equalities;

        const auto tuples = enumerate_valid_tuples(z, k, n);
        if (BigInt(tuples.size()) != count) ++s.enumeration_mismatches;
        std::set<std::string> words;
        for (const auto& t : tuples) {
          const std::string w = encode_tuple(t);
          std::size_t terminal = 0;
          for (char c : w) terminal += (c == 'P' || c == 'M');
          if (w.size() != n || terminal != k || decode_word(w) != t || !words.insert(w).second) ++s.coding_failures;
        }
      }
  return s;
}

}  // namespace fracdrift
