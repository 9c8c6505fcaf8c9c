#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fracdrift {

using BigInt = boost::multiprecision::cpp_int;

// A valid (k+1)-tuple is (0, s_1, ..., s_{k-1}, z) with consecutive entries distinct; its
// length is n = sum |s_{i+1} - s_i|.

// Exact number of valid (k+1)-tuples ending at z with length n.
BigInt valid_tuple_count(long z, unsigned k, unsigned n);

// Number of words that can code such a tuple: 1{2 | n - z} C(n, (n - |z|)/2) C(n - 1, k - 1).
BigInt coding_count_bound(long z, unsigned k, unsigned n);

// Unit steps as symbols: 'p' / 'm' inside a move, 'P' / 'M' for the last unit of a move
// (upper case = terminal). The tuple must start at 0 and have distinct consecutive entries.
std::string encode_tuple(const std::vector<long>& tuple);
// Inverse of encode_tuple; throws DomainError on a word that is not a valid coding.
std::vector<long> decode_word(const std::string& word);

// Every valid tuple with the given (z, k, n), in lexicographic order of the steps.
std::vector<std::vector<long>> enumerate_valid_tuples(long z, unsigned k, unsigned n);

struct CodingCheckSummary {
  unsigned max_abs_z = 0, max_k = 0, max_n = 0;
  std::size_t cases = 0;
  std::size_t equalities = 0;          // count == bound
  std::size_t violations = 0;          // count > bound
  std::size_t enumeration_mismatches = 0;  // recursion vs explicit enumeration
  std::size_t coding_failures = 0;     // decode(encode(t)) != t, duplicate words or wrong shape
};

// Checks count <= bound for all |z| <= max_abs_z, 1 <= k <= max_k, 0 <= n <= max_n,
// cross-checking the recursive count against explicit enumeration and the coding map.
CodingCheckSummary verify_coding_bound(unsigned max_abs_z, unsigned max_k, unsigned max_n);

}  // namespace fracdrift
