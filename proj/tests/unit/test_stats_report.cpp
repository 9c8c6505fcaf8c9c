#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fracdrift/grid_path.hpp"
#include "fracdrift/report.hpp"
#include "fracdrift/stats.hpp"

using namespace fracdrift;
using doctest::Approx;

// Reference values below are frozen from scipy.stats.norm and statsmodels proportion_confint.

TEST_CASE("normal quantiles and tails") {
  CHECK(normal_upper_quantile(0.025) == Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_upper_quantile(5e-4) == Approx(3.2905267314918945).epsilon(1e-10));
  CHECK(normal_tail(0.0) == Approx(0.5));
  CHECK(normal_tail(normal_upper_quantile(1e-7)) == Approx(1e-7).epsilon(1e-9));
  for (double x : {0.5, 1.0, 2.0, 4.0}) CHECK(normal_tail(x) <= std::exp(-x * x / 2));
}

TEST_CASE("bonferroni_threshold") {
  CHECK(bonferroni_threshold(2080) == Approx(5.033832723585978).epsilon(1e-10));
  CHECK(bonferroni_threshold(10) == Approx(4.0));  // 3.89 is below the floor
  CHECK(bonferroni_threshold(1, 1e-3, 0.0) == Approx(3.2905267314918945).epsilon(1e-10));
}

TEST_CASE("wilson_interval") {
  const Interval a = wilson_interval(30, 100);
  CHECK(a.low == Approx(0.21894885294932756).epsilon(1e-10));
  CHECK(a.high == Approx(0.39584854633346667).epsilon(1e-10));
  const Interval b = wilson_interval(0, 1000);
  CHECK(b.low == Approx(0.0).epsilon(1e-15));
  CHECK(b.high == Approx(0.003826758485555125).epsilon(1e-10));
}

TEST_CASE("Moments merge equals sequential accumulation") {
  Moments all, left, right;
  for (int k = 0; k < 50; ++k) {
    const double x = std::sin(k * 1.7) + 0.1 * k;
    all.add(x);
    (k < 20 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.count() == all.count());
  CHECK(left.mean() == Approx(all.mean()).epsilon(1e-14));
  CHECK(left.variance() == Approx(all.variance()).epsilon(1e-13));
}

TEST_CASE("SecondMoments covariance and standard errors") {
  SecondMoments s(2);
  const double xs[4][2] = {{1, 2}, {-1, 0}, {2, -2}, {0, 1}};
  for (auto& x : xs) s.add(std::span<const double>(x, 2));
  const Eigen::MatrixXd c = s.covariance();
  CHECK(c(0, 0) == Approx(6.0 / 4));
  CHECK(c(0, 1) == Approx(-2.0 / 4));
  CHECK(c(1, 1) == Approx(9.0 / 4));
  const Eigen::MatrixXd se = s.std_errors();
  CHECK(se(0, 1) == Approx(std::sqrt((c(0, 0) * c(1, 1) + c(0, 1) * c(0, 1)) / 4)));
}

TEST_CASE("median and quantile") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(quantile({0, 10}, 0.25) == Approx(2.5));
  const Interval m = median_interval({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20});
  CHECK(m.low <= 10.5);
  CHECK(m.high >= 10.5);
}

namespace {

ExperimentReport sample_report() {
  ExperimentReport r;
  r.name = "demo";
  r.seed = 17;
  r.config = {{"z_first", 1}, {"a_second", 0.1}, {"nested", {{"k", "v"}}}};
  r.add_estimate("p", 0.1 + 0.2, 0.25, 0.35, 1000);
  r.add_estimate("huge", 1e300, -1e300, 1e300, 0);
  r.add_trend("t", {1.0 / 3.0, 2.0, -0.0});
  r.add_check("c1", 0.5, 1.0, "fine");
  r.add_check("c2", 2.0, 1.0);
  r.wall_time = 1.25;
  r.stamp_now();
  return r;
}

}  // namespace

TEST_CASE("Check passes iff statistic <= threshold") {
  const ExperimentReport r = sample_report();
  CHECK(r.checks[0].passed);
  CHECK_FALSE(r.checks[1].passed);
  CHECK_FALSE(r.passed());
}

TEST_CASE("report JSON round trip is bit faithful") {
  const ExperimentReport r = sample_report();
  const auto j = to_json(r);
  CHECK(validate_report_json(nlohmann::json::parse(j.dump())).empty());
  const ExperimentReport back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.name == r.name);
  CHECK(back.seed == r.seed);
  CHECK(back.estimates[0].value == r.estimates[0].value);
  CHECK(back.trends[0].second == r.trends[0].second);
  CHECK(nlohmann::json::parse(to_json(back).dump()) == nlohmann::json::parse(j.dump()));
  const auto nt = to_json(r, false);
  CHECK_FALSE(nt.contains("wall_time"));
  CHECK_FALSE(nt.contains("timestamp"));
  // config key order is preserved on output
  CHECK(j["config"].begin().key() == "z_first");
}

TEST_CASE("non-finite values serialize as null") {
  ExperimentReport r;
  r.name = "nan";
  r.add_estimate("x", std::nan(""), 0, 0, 0);
  const auto j = to_json(r);
  CHECK(j["estimates"][0]["value"].is_null());
}

TEST_CASE("validate_report_json catches schema violations") {
  auto j = nlohmann::json::parse(to_json(sample_report()).dump());
  j.erase("name");
  j["checks"][0]["passed"] = "yes";
  CHECK(validate_report_json(j).size() >= 2);
}

TEST_CASE("report CSV twin") {
  std::ostringstream os;
  write_csv(os, sample_report());
  const std::string s = os.str();
  CHECK(s.rfind("section,name,index,value,ci_low,ci_high,n_samples", 0) == 0);
  CHECK(s.find("estimate,p,") != std::string::npos);
  CHECK(s.find("0.30000000000000004") != std::string::npos);
}

TEST_CASE("GridPath CSV and JSON round trips") {
  GridPath p;
  p.t0 = -0.5;
  p.dt = 0.1;
  p.kind = PathKind::fBm;
  p.values = {0.1, 1.0 / 3.0, -2e-300, 7.25, 1e10, 0.0};
  std::ostringstream os;
  write_csv(os, p);
  std::istringstream is(os.str());
  const GridPath q = read_csv(is, PathKind::fBm);
  CHECK(q.values == p.values);
  CHECK(q.t0 == Approx(p.t0));
  CHECK(q.dt == Approx(p.dt));
  const GridPath r = grid_path_from_json(to_json(p));
  CHECK(r.values == p.values);
  CHECK(r.kind == PathKind::fBm);
  CHECK(p.index_of(0.0) == 5);
  CHECK_THROWS(p.index_of(0.05));
  CHECK(path_kind_from_string(to_string(PathKind::LevyfBm)) == PathKind::LevyfBm);

  Trajectory t{{0.25, 0.5}, {1.5, -2.0 / 3.0}};
  const Trajectory u = trajectory_from_json(to_json(t));
  CHECK(u.times == t.times);
  CHECK(u.values == t.values);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
