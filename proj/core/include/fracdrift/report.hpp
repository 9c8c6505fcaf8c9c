#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fracdrift {

struct Estimate {
  std::string name;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t n_samples = 0;
};

// A pass/fail verdict: passed iff statistic <= threshold.
struct Check {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

// Seeded record of one experiment. wall_time and timestamp are the only fields that vary
// between identical runs.
struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<Estimate> estimates;
  std::vector<std::pair<std::string, std::vector<double>>> trends;
  std::vector<Check> checks;
  double wall_time = 0.0;
  std::string timestamp;

  bool passed() const;
  Estimate& add_estimate(std::string name, double value, double ci_low, double ci_high, std::uint64_t n);
  Check& add_check(std::string name, double statistic, double threshold, std::string detail = {});
  void add_trend(std::string name, std::vector<double> values);
  const Estimate* find_estimate(const std::string& name) const;
  const std::vector<double>* find_trend(const std::string& name) const;
  void stamp_now();
};

// Non-finite doubles are written as null.
nlohmann::ordered_json to_json(const ExperimentReport& r, bool include_timing = true);
ExperimentReport report_from_json(const nlohmann::json& j);

// Empty when j satisfies the report schema, otherwise one message per violation.
std::vector<std::string> validate_report_json(const nlohmann::json& j);

// CSV twin: section,name,index,value,ci_low,ci_high,n_samples.
void write_csv(std::ostream& os, const ExperimentReport& r);

}  // namespace fracdrift
