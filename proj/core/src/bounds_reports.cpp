#include "fracdrift/bounds_reports.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#include "fracdrift/grid_path.hpp"
#include "fracdrift/matrix_lemma.hpp"
#include "fracdrift/word_coding.hpp"

namespace fracdrift {

namespace {

// Compact form for check and estimate names.
std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

ExperimentReport matrix_lemma_report(const std::vector<std::size_t>& ns, const std::vector<double>& eps_values,
                                     std::size_t trials, std::uint64_t seed, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.name = "matrix_lemma";
  rep.seed = seed;
  rep.config = {{"n", ns}, {"eps", eps_values}, {"random_trials", trials}, {"adversarial", 3}};
  for (std::size_t n : ns)
    for (double eps : eps_values) {
      const MatrixBatchSummary s = matrix_bounds_batch(n, eps, trials, seed, threads);
      const std::string tag = "n" + std::to_string(n) + "_eps" + short_number(eps);
      const auto inst = static_cast<std::uint64_t>(s.trials);
      rep.add_estimate(tag + "_min_det_margin", s.min_det_margin, s.min_det_margin, s.min_det_margin, inst);
      rep.add_estimate(tag + "_min_offdiag_margin", s.min_offdiag_margin, s.min_offdiag_margin,
                       s.min_offdiag_margin, inst);
      rep.add_estimate(tag + "_min_diag_margin", s.min_diag_margin, s.min_diag_margin, s.min_diag_margin, inst);
      rep.add_check(tag + "_violations", static_cast<double>(s.violations()), 0.0,
                    "det " + std::to_string(s.det_violations) + ", off-diagonal " +
                        std::to_string(s.offdiag_violations) + ", diagonal " + std::to_string(s.diag_violations) +
                        ", norm " + std::to_string(s.norm_violations) + " over " + std::to_string(s.trials) +
                        " instances");
    }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

ExperimentReport coding_bound_report(unsigned max_abs_z, unsigned max_k, unsigned max_n) {
  const auto start = std::chrono::steady_clock::now();
  const CodingCheckSummary s = verify_coding_bound(max_abs_z, max_k, max_n);
  ExperimentReport rep;
  rep.name = "word_coding";
  rep.config = {{"max_abs_z", max_abs_z}, {"max_k", max_k}, {"max_n", max_n}};
  const auto cases = static_cast<double>(s.cases);
  rep.add_estimate("cases", cases, cases, cases, s.cases);
  rep.add_estimate("equalities", static_cast<double>(s.equalities), static_cast<double>(s.equalities),
                   static_cast<double>(s.equalities), s.cases);
  rep.add_check("bound_violations", static_cast<double>(s.violations), 0.0, "cases with count > bound");
  rep.add_check("enumeration_mismatches", static_cast<double>(s.enumeration_mismatches), 0.0,
                "recursive count differs from explicit enumeration");
  rep.add_check("coding_failures", static_cast<double>(s.coding_failures), 0.0,
                "wrong word shape, failed decode or duplicate word");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

}  // namespace fracdrift
