#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fracdrift/report.hpp"

namespace fracdrift {

// matrix_bounds_batch over every (n, eps) pair; one violation-count check per pair.
ExperimentReport matrix_lemma_report(const std::vector<std::size_t>& ns, const std::vector<double>& eps_values,
                                     std::size_t trials, std::uint64_t seed, unsigned threads = 0);

// verify_coding_bound as a report: bound violations, enumeration mismatches, coding failures.
ExperimentReport coding_bound_report(unsigned max_abs_z, unsigned max_k, unsigned max_n);

}  // namespace fracdrift
