#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdrift/report.hpp"

namespace fracdrift::selftest {

struct Options {
  std::uint64_t seed = 1;
  unsigned threads = 0;            // 0 = all hardware threads
  std::vector<int> only;           // empty = criteria 1..11
  unsigned determinism_threads = 0;  // thread count of the rerun; 0 = pick one different from `threads`
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool checks_passed = false;
  std::string detail;
  double seconds = 0.0;
  double runtime_limit = 0.0;      // 0 = none
  std::vector<ExperimentReport> reports;

  bool within_runtime() const { return runtime_limit <= 0.0 || seconds <= runtime_limit; }
  bool passed() const { return checks_passed && within_runtime(); }
};

struct Criterion {
  int id;
  std::string name;
  double runtime_limit;
};

const std::vector<Criterion>& criteria();

// Runs one of criteria 1..10.
CriterionResult run_criterion(int id, const Options& opt);

// Runs the selected criteria in order, calling on_result after each. Criterion 11 reruns
// criteria 1..10 at a different thread count and compares the deterministic JSON byte for byte.
std::vector<CriterionResult> run(const Options& opt,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

// Timing fields (seconds, wall_time, timestamp) are only written when include_timing is set.
nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results, const Options& opt,
                               bool include_timing = true);

// "PASS  1 name  (1.2 s, limit 60 s)  detail"
std::string summary_line(const CriterionResult& r);

}  // namespace fracdrift::selftest
