#include "selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "fracdrift/bounds_reports.hpp"
#include "fracdrift/conditioning.hpp"
#include "fracdrift/experiments.hpp"
#include "fracdrift/gamma_field.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/subgaussian.hpp"
#include "fracdrift/validation.hpp"

namespace fracdrift::selftest {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

const Check& check(const ExperimentReport& r, const std::string& name) {
  for (const Check& c : r.checks)
    if (c.name == name) return c;
  throw std::logic_error("selftest: report " + r.name + " has no check " + name);
}

double estimate(const ExperimentReport& r, const std::string& name) {
  const Estimate* e = r.find_estimate(name);
  if (!e) throw std::logic_error("selftest: report " + r.name + " has no estimate " + name);
  return e->value;
}

bool all_pass(const std::vector<ExperimentReport>& reps) {
  return std::all_of(reps.begin(), reps.end(), [](const ExperimentReport& r) { return r.passed(); });
}

// Names of failing checks, or "" when everything passed.
std::string failures(const std::vector<ExperimentReport>& reps) {
  std::string out;
  for (const ExperimentReport& r : reps)
    for (const Check& c : r.checks)
      if (!c.passed) out += (out.empty() ? "failed: " : ", ") + r.name + "." + c.name + "=" + num(c.statistic);
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

void covariance(const Options& o, CriterionResult& res) {
  std::vector<std::string> d;
  for (double H : {0.25, 0.75}) {
    CovarianceFidelityConfig cfg;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    res.reports.push_back(covariance_fidelity(make_context(H), cfg));
    const auto& r = res.reports.back();
    d.push_back("H=" + num(H) + " max z fBm " + num(check(r, "fbm_cov_matches").statistic) + ", Levy " +
                num(check(r, "levy_cov_matches").statistic) + " (limit " +
                num(check(r, "fbm_cov_matches").threshold) + ")");
  }
  res.checks_passed = all_pass(res.reports);
  res.detail = join(d);
}

void conditioning(const Options& o, CriterionResult& res) {
  std::vector<std::string> d;
  bool ok = true;
  for (double H : {0.25, 0.75}) {
    ConditioningConfig cfg;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    res.reports.push_back(validate_conditioning(make_context(H), cfg));
    cfg.omit_drift = true;
    res.reports.push_back(validate_conditioning(make_context(H), cfg));
    const ExperimentReport& main = res.reports[res.reports.size() - 2];
    const ExperimentReport& ctl = res.reports.back();
    ok = ok && main.passed();
    ok = ok && !ctl.passed();
    d.push_back("H=" + num(H) + " cross " + num(check(main, "residual_uncorrelated_with_past").statistic) + ", cov " +
                num(check(main, "residual_cov_matches_levy").statistic) + ", control " +
                (ctl.passed() ? "PASSED (should fail)" : "fails"));
  }
  res.checks_passed = ok;
  res.detail = join(d);
}

void drift(const Options& o, CriterionResult& res) {
  DriftEquivalenceConfig cfg;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  res.reports.push_back(drift_equivalence(make_context(0.75), cfg));
  const auto& r = res.reports.back();
  const auto* t = r.find_trend("relative_l2");
  std::string s = "H=0.75 relative L2";
  for (std::size_t k = 0; k < t->size(); ++k)
    s += " h=1/" + std::to_string(cfg.levels[k]) + ":" + num((*t)[k]);
  res.checks_passed = r.passed();
  res.detail = s + " (limits " + num(cfg.default_limit) + " / " + num(cfg.refined_limit) + ")";
}

void round_trip(const Options& o, CriterionResult& res) {
  std::vector<std::string> d;
  for (double H : {0.25, 0.75, 0.5}) {
    RoundTripConfig cfg;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    res.reports.push_back(inversion_round_trip(make_context(H), cfg));
    const auto& r = res.reports.back();
    if (H == 0.5)
      d.push_back("H=0.5 max abs " + num(check(r, "exact_at_half").statistic));
    else
      d.push_back("H=" + num(H) + " relative L2 " + num(check(r, "default_grid_error").statistic));
  }
  res.checks_passed = all_pass(res.reports);
  res.detail = join(d) + (res.checks_passed ? "" : "; " + failures(res.reports));
}

void matrix(const Options& o, CriterionResult& res) {
  res.reports.push_back(matrix_lemma_report({4, 16, 64}, {0.01, 0.05, 0.1}, 1000, o.seed, o.threads));
  double v = 0;
  for (const Check& c : res.reports.back().checks) v += c.statistic;
  res.checks_passed = all_pass(res.reports);
  res.detail = "9 configurations x 1003 instances, " + num(v) + " violations";
}

void coding(const Options&, CriterionResult& res) {
  res.reports.push_back(coding_bound_report(6, 4, 12));
  const auto& r = res.reports.back();
  res.checks_passed = r.passed();
  res.detail = num(estimate(r, "cases")) + " cases, " + num(estimate(r, "equalities")) + " equalities, " +
               num(check(r, "bound_violations").statistic) + " violations, " +
               num(check(r, "enumeration_mismatches").statistic) + " enumeration mismatches, " +
               num(check(r, "coding_failures").statistic) + " coding failures";
}

void subgauss(const Options& o, CriterionResult& res) {
  struct Case {
    double theta;
    SupProcess p;
    double H;
  };
  std::vector<std::string> d;
  for (const Case& c : {Case{0.5, SupProcess::brownian, 0.5}, Case{0.5, SupProcess::fbm, 0.75},
                        Case{1.0, SupProcess::linear, 0.5}}) {
    SubGaussianMcConfig cfg;
    cfg.theta = c.theta;
    cfg.process = c.p;
    cfg.hurst = c.H;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    res.reports.push_back(subgaussian_monte_carlo(cfg));
    const auto& r = res.reports.back();
    double worst = -INFINITY;
    for (const Check& ch : r.checks) worst = std::max(worst, ch.statistic);
    d.push_back("theta=" + num(c.theta) + " " + to_string(c.p) + " P(sup>=1)=" +
                num(estimate(r, "sup_exceed_probability_x1")) + " vs " + num(estimate(r, "bound_x1")) +
                ", max z " + num(worst));
  }
  res.checks_passed = all_pass(res.reports);
  res.detail = join(d);
}

void decay(const Options& o, CriterionResult& res) {
  std::vector<std::string> d;
  for (double r : {0.1, 0.5}) {
    GammaConfig g;
    g.ctx = make_context(0.75);
    g.r = r;
    res.reports.push_back(gamma_decay_report(g, 30));
    GammaMonteCarloConfig mc;
    mc.seed = o.seed;
    mc.threads = o.threads;
    res.reports.push_back(gamma_monte_carlo(g, mc));
    const auto& dec = res.reports[res.reports.size() - 2];
    const auto& m = res.reports.back();
    const double slope = check(dec, "no_increasing_trend").statistic;
    d.push_back("r=" + num(r) + " sup scaled " + num(estimate(dec, "cf_fit")) + ", tail slope " + num(slope) +
                ", MC max z " + num(check(m, "gamma_cov_matches_monte_carlo").statistic));
  }
  res.checks_passed = all_pass(res.reports);
  res.detail = join(d) + (res.checks_passed ? "" : "; " + failures(res.reports));
}

void lil(const Options& o, CriterionResult& res) {
  LilConfig cfg;
  cfg.ctx = make_context(0.75);
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  res.reports.push_back(lil_statistic(cfg));
  const auto& r = res.reports.back();
  const auto* med = r.find_trend("median_M");
  std::string s = "medians";
  for (std::size_t k = 0; k < med->size(); ++k)
    s += " i_max=" + std::to_string(cfg.i_max_ladder[k]) + ":" + num((*med)[k]);
  const double t = estimate(r, "target");
  res.checks_passed = r.passed();
  res.detail = s + ", band [" + num(t - cfg.band_below) + ", " + num(t + cfg.band_above) + "]" +
               (res.checks_passed ? "" : "; " + failures(res.reports));
}

void arbitrage(const Options& o, CriterionResult& res) {
  ArbitrageConfig cfg;
  cfg.ctx = make_context(0.75);
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  res.reports.push_back(a_n_probability(cfg));
  const auto& r = res.reports.back();
  std::string s = "log P/n";
  for (std::size_t n : cfg.n_ladder)
    if (n > 1) s += " n=" + std::to_string(n) + ":" + num(estimate(r, "log_P_over_n_" + std::to_string(n)));
  s += ", P(A_1)=" + num(estimate(r, "P_A_1"));
  res.checks_passed = r.passed();
  res.detail = s + (res.checks_passed ? "" : "; " + failures(res.reports));
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "covariance_fidelity", 60.0},   {2, "conditioning_decomposition", 300.0},
      {3, "drift_equivalence", 0.0},      {4, "inversion_round_trip", 0.0},
      {5, "matrix_lemma", 60.0},          {6, "word_coding_count", 30.0},
      {7, "subgaussian_sup_bound", 0.0},  {8, "gamma_covariance_decay", 0.0},
      {9, "lil_trend", 0.0},              {10, "a_n_decay_trend", 600.0},
      {11, "determinism", 0.0}};
  return list;
}

CriterionResult run_criterion(int id, const Options& opt) {
  if (id < 1 || id > 10) throw std::out_of_range("selftest: run_criterion covers criteria 1..10");
  const Criterion& c = criteria()[static_cast<std::size_t>(id - 1)];
  CriterionResult res;
  res.id = id;
  res.name = c.name;
  res.runtime_limit = c.runtime_limit;
  const auto start = std::chrono::steady_clock::now();
  using Fn = void (*)(const Options&, CriterionResult&);
  static const Fn fns[] = {covariance, conditioning, drift, round_trip, matrix,
                           coding,     subgauss,     decay, lil,        arbitrage};
  try {
    fns[id - 1](opt, res);
  } catch (const std::exception& e) {
    res.checks_passed = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results, const Options& opt,
                               bool include_timing) {
  nlohmann::ordered_json j;
  j["seed"] = opt.seed;
  if (include_timing) j["threads"] = opt.threads == 0 ? default_threads() : opt.threads;
  j["criteria"] = nlohmann::ordered_json::array();
  bool all = true;
  for (const CriterionResult& r : results) {
    nlohmann::ordered_json c;
    c["id"] = r.id;
    c["name"] = r.name;
    c["checks_passed"] = r.checks_passed;
    c["detail"] = r.detail;
    if (include_timing) {
      c["seconds"] = r.seconds;
      c["runtime_limit"] = r.runtime_limit;
      c["passed"] = r.passed();
    }
    c["reports"] = nlohmann::ordered_json::array();
    for (const ExperimentReport& rep : r.reports) c["reports"].push_back(fracdrift::to_json(rep, include_timing));
    j["criteria"].push_back(std::move(c));
    all = all && (include_timing ? r.passed() : r.checks_passed);
  }
  j["passed"] = all;
  return j;
}

std::vector<CriterionResult> run(const Options& opt, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = opt.only;
  if (ids.empty())
    for (const Criterion& c : criteria()) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids)
    if (id < 1 || id > 11) throw std::out_of_range("selftest: criterion ids are 1..11");
  const bool want11 = ids.back() == 11;

  std::vector<CriterionResult> out, base(10);
  std::vector<bool> have(10, false);
  for (int id : ids) {
    if (id == 11) break;
    base[id - 1] = run_criterion(id, opt);
    have[id - 1] = true;
    out.push_back(base[id - 1]);
    if (on_result) on_result(out.back());
  }
  if (!want11) return out;

  CriterionResult det;
  det.id = 11;
  det.name = criteria()[10].name;
  const auto start = std::chrono::steady_clock::now();
  for (int id = 1; id <= 10; ++id)
    if (!have[id - 1]) base[id - 1] = run_criterion(id, opt);
  const unsigned t0 = opt.threads == 0 ? default_threads() : opt.threads;
  Options again = opt;
  again.threads = opt.determinism_threads != 0 ? opt.determinism_threads : (t0 == 1 ? 4 : 1);
  std::vector<CriterionResult> rerun;
  for (int id = 1; id <= 10; ++id) rerun.push_back(run_criterion(id, again));
  const std::string a = to_json(base, opt, false).dump(), b = to_json(rerun, again, false).dump();
  det.checks_passed = a == b;
  if (det.checks_passed) {
    det.detail = "criteria 1-10 at threads " + std::to_string(t0) + " and " + std::to_string(again.threads) +
                 ": " + std::to_string(a.size()) + " bytes, identical";
  } else {
    std::size_t k = 0;
    while (k < std::min(a.size(), b.size()) && a[k] == b[k]) ++k;
    det.detail = "threads " + std::to_string(t0) + " vs " + std::to_string(again.threads) +
                 ": reports differ from byte " + std::to_string(k) + " near '" + a.substr(k > 40 ? k - 40 : 0, 80) +
                 "'";
  }
  det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.push_back(det);
  if (on_result) on_result(out.back());
  return out;
}

std::string summary_line(const CriterionResult& r) {
  char head[128];
  std::snprintf(head, sizeof head, "%s %2d %-28s (%.1f s", r.passed() ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
  std::string s = head;
  if (r.runtime_limit > 0.0) s += ", limit " + num(r.runtime_limit) + " s";
  s += ")  ";
  if (!r.within_runtime()) s += "over runtime limit; ";
  return s + r.detail;
}

}  // namespace fracdrift::selftest
