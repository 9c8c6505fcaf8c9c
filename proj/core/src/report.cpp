#include "fracdrift/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <ostream>

#include "fracdrift/errors.hpp"
#include "fracdrift/grid_path.hpp"

namespace fracdrift {

namespace {

nlohmann::ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

double from_num(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

std::string csv_num(double x) { return std::isfinite(x) ? format_double(x) : std::string(); }

}  // namespace

bool ExperimentReport::passed() const {
  for (const Check& c : checks)
    if (!c.passed) return false;
  return true;
}

Estimate& ExperimentReport::add_estimate(std::string n, double value, double lo, double hi, std::uint64_t samples) {
  estimates.push_back({std::move(n), value, lo, hi, samples});
  return estimates.back();
}

Check& ExperimentReport::add_check(std::string n, double statistic, double threshold, std::string detail) {
  const bool ok = std::isfinite(statistic) && statistic <= threshold;
  checks.push_back({std::move(n), statistic, threshold, ok, std::move(detail)});
  return checks.back();
}

void ExperimentReport::add_trend(std::string n, std::vector<double> values) {
  trends.emplace_back(std::move(n), std::move(values));
}

const Estimate* ExperimentReport::find_estimate(const std::string& n) const {
  for (const Estimate& e : estimates)
    if (e.name == n) return &e;
  return nullptr;
}

const std::vector<double>* ExperimentReport::find_trend(const std::string& n) const {
  for (const auto& t : trends)
    if (t.first == n) return &t.second;
  return nullptr;
}

void ExperimentReport::stamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  timestamp = buf;
}

nlohmann::ordered_json to_json(const ExperimentReport& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["seed"] = r.seed;
  j["config"] = r.config;
  auto& est = j["estimates"] = nlohmann::ordered_json::array();
  for (const Estimate& e : r.estimates)
    est.push_back({{"name", e.name},
                   {"value", num(e.value)},
                   {"ci_low", num(e.ci_low)},
                   {"ci_high", num(e.ci_high)},
                   {"n_samples", e.n_samples}});
  auto& tr = j["trends"] = nlohmann::ordered_json::object();
  for (const auto& [name, values] : r.trends) {
    auto& a = tr[name] = nlohmann::ordered_json::array();
    for (double v : values) a.push_back(num(v));
  }
  auto& ch = j["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : r.checks)
    ch.push_back({{"name", c.name},
                  {"statistic", num(c.statistic)},
                  {"threshold", num(c.threshold)},
                  {"passed", c.passed},
                  {"detail", c.detail}});
  j["passed"] = r.passed();
  if (include_timing) {
    j["wall_time"] = r.wall_time;
    j["timestamp"] = r.timestamp;
  }
  return j;
}

std::vector<std::string> validate_report_json(const nlohmann::json& j) {
  std::vector<std::string> err;
  if (!j.is_object()) return {"report must be a JSON object"};
  auto need = [&](const char* key, auto pred, const char* what) {
    if (!j.contains(key)) err.push_back(std::string("missing field '") + key + "'");
    else if (!pred(j[key])) err.push_back(std::string("field '") + key + "' must be " + what);
  };
  auto is_num_or_null = [](const nlohmann::json& x) { return x.is_number() || x.is_null(); };
  need("name", [](const nlohmann::json& x) { return x.is_string(); }, "a string");
  need("seed", [](const nlohmann::json& x) { return x.is_number_unsigned() || x.is_number_integer(); }, "an integer");
  need("config", [](const nlohmann::json& x) { return x.is_object(); }, "an object");
  need("estimates", [](const nlohmann::json& x) { return x.is_array(); }, "an array");
  need("trends", [](const nlohmann::json& x) { return x.is_object(); }, "an object");
  need("checks", [](const nlohmann::json& x) { return x.is_array(); }, "an array");
  need("passed", [](const nlohmann::json& x) { return x.is_boolean(); }, "a boolean");
  if (j.contains("wall_time") && !j["wall_time"].is_number()) err.push_back("field 'wall_time' must be a number");
  if (j.contains("timestamp") && !j["timestamp"].is_string()) err.push_back("field 'timestamp' must be a string");
  if (j.contains("estimates") && j["estimates"].is_array()) {
    for (std::size_t i = 0; i < j["estimates"].size(); ++i) {
      const auto& e = j["estimates"][i];
      const std::string at = "estimates[" + std::to_string(i) + "]";
      if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
        err.push_back(at + " needs a string 'name'");
        continue;
      }
      for (const char* k : {"value", "ci_low", "ci_high"})
        if (!e.contains(k) || !is_num_or_null(e[k])) err.push_back(at + "." + k + " must be a number or null");
      if (!e.contains("n_samples") || !e["n_samples"].is_number_integer())
        err.push_back(at + ".n_samples must be an integer");
    }
  }
  if (j.contains("trends") && j["trends"].is_object()) {
    for (const auto& [k, v] : j["trends"].items()) {
      if (!v.is_array()) {
        err.push_back("trends." + k + " must be an array");
        continue;
      }
      for (const auto& x : v)
        if (!is_num_or_null(x)) err.push_back("trends." + k + " must hold numbers");
    }
  }
  if (j.contains("checks") && j["checks"].is_array()) {
    for (std::size_t i = 0; i < j["checks"].size(); ++i) {
      const auto& c = j["checks"][i];
      const std::string at = "checks[" + std::to_string(i) + "]";
      if (!c.is_object() || !c.contains("name") || !c["name"].is_string() || !c.contains("passed") ||
          !c["passed"].is_boolean() || !c.contains("statistic") || !is_num_or_null(c["statistic"]) ||
          !c.contains("threshold") || !is_num_or_null(c["threshold"]) || !c.contains("detail") ||
          !c["detail"].is_string())
        err.push_back(at + " needs name, statistic, threshold, passed and detail");
    }
  }
  return err;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  const auto errors = validate_report_json(j);
  if (!errors.empty()) throw DomainError("invalid report: " + errors.front());
  ExperimentReport r;
  r.name = j["name"].get<std::string>();
  r.seed = j["seed"].get<std::uint64_t>();
  r.config = nlohmann::ordered_json::parse(j["config"].dump());
  for (const auto& e : j["estimates"])
    r.estimates.push_back({e["name"].get<std::string>(), from_num(e["value"]), from_num(e["ci_low"]),
                           from_num(e["ci_high"]), e["n_samples"].get<std::uint64_t>()});
  for (const auto& [k, v] : j["trends"].items()) {
    std::vector<double> vals;
    for (const auto& x : v) vals.push_back(from_num(x));
    r.trends.emplace_back(k, std::move(vals));
  }
  for (const auto& c : j["checks"])
    r.checks.push_back({c["name"].get<std::string>(), from_num(c["statistic"]), from_num(c["threshold"]),
                        c["passed"].get<bool>(), c["detail"].get<std::string>()});
  if (j.contains("wall_time")) r.wall_time = j["wall_time"].get<double>();
  if (j.contains("timestamp")) r.timestamp = j["timestamp"].get<std::string>();
  return r;
}

void write_csv(std::ostream& os, const ExperimentReport& r) {
  os << "section,name,index,value,ci_low,ci_high,n_samples\n";
  for (const Estimate& e : r.estimates)
    os << "estimate," << e.name << ",0," << csv_num(e.value) << ',' << csv_num(e.ci_low) << ','
       << csv_num(e.ci_high) << ',' << e.n_samples << '\n';
  for (const auto& [name, values] : r.trends)
    for (std::size_t i = 0; i < values.size(); ++i)
      os << "trend," << name << ',' << i << ',' << csv_num(values[i]) << ",,,\n";
  for (const Check& c : r.checks)
    os << "check," << c.name << ',' << (c.passed ? 1 : 0) << ',' << csv_num(c.statistic) << ",,"
       << csv_num(c.threshold) << ",\n";
}

}  // namespace fracdrift
