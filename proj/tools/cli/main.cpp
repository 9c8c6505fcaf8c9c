#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracdrift/bounds_reports.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/experiments.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/gamma_field.hpp"
#include "fracdrift/matrix_lemma.hpp"
#include "fracdrift/prediction.hpp"
#include "fracdrift/report.hpp"
#include "fracdrift/subgaussian.hpp"
#include "fracdrift/thick_set.hpp"
#include "fracdrift/validation.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using namespace fracdrift;
using nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitAccuracy = 3;

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string format = "json";
  bool no_timing = false;
};

// Flags shared by the subcommands. Unset optionals fall back to per-command defaults.
struct Params {
  std::optional<double> hurst, r, alpha, p, dt, umax, horizon, theta;
  std::optional<double> alpha_prime, p_prime, r_tilde;
  std::optional<std::size_t> paths, trials;
  std::vector<std::size_t> n;
  std::vector<double> v, t, eps, pa;
  std::vector<int> only;
  std::string in, method = "auto", process = "brownian", set = "naturals";
  std::size_t future = 0, k = 3;
  std::optional<std::size_t> levels_fine;
  std::vector<std::size_t> levels;
};

Common g_common;
Params g_p;

HurstContext context(double fallback = 0.75) { return make_context(g_p.hurst.value_or(fallback)); }

std::size_t n_or(std::size_t fallback) { return g_p.n.empty() ? fallback : g_p.n.front(); }

fs::path resolve_out(const std::string& out) {
  fs::path p(out);
  if (p.is_relative())
    if (const char* dir = std::getenv("FRACDRIFT_OUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

void write_text(const std::string& text) {
  if (g_common.out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p = resolve_out(g_common.out);
  std::ofstream f(p);
  if (!f) throw DomainError("cannot open output file " + p.string());
  f << text;
}

void emit(const ExperimentReport& r) {
  const ordered_json j = to_json(r, !g_common.no_timing);
  const nlohmann::json plain = nlohmann::json::parse(j.dump());
  if (const auto errs = validate_report_json(plain); !errs.empty())
    throw std::logic_error("report fails its schema: " + errs.front());
  if (nlohmann::json::parse(to_json(report_from_json(plain), !g_common.no_timing).dump()) != plain)
    throw std::logic_error("report does not round-trip through JSON");
  if (g_common.format == "csv") {
    std::ostringstream os;
    write_csv(os, r);
    write_text(os.str());
  } else {
    write_text(j.dump(2) + "\n");
  }
}

GridPath from_json(const nlohmann::json& j, const GridPath*) { return grid_path_from_json(j); }
Trajectory from_json(const nlohmann::json& j, const Trajectory*) { return trajectory_from_json(j); }

template <class T>
void emit_path(const T& path) {
  const nlohmann::json j = to_json(path);
  if (to_json(from_json(nlohmann::json::parse(j.dump()), &path)).dump() != j.dump())
    throw std::logic_error("path does not round-trip through JSON");
  if (g_common.format == "csv") {
    std::ostringstream os;
    write_csv(os, path);
    write_text(os.str());
  } else {
    write_text(j.dump(2) + "\n");
  }
}

ExperimentReport make_report(std::string name, ordered_json config) {
  ExperimentReport r;
  r.name = std::move(name);
  r.seed = g_common.seed;
  r.config = std::move(config);
  r.stamp_now();
  return r;
}

void add_value(ExperimentReport& r, const std::string& name, double v, std::uint64_t n = 0) {
  r.add_estimate(name, v, v, v, n);
}

GridPath read_path(const std::string& file, PathKind kind) {
  std::ifstream f(file);
  if (!f) throw DomainError("cannot open input file " + file);
  if (fs::path(file).extension() == ".json") return grid_path_from_json(nlohmann::json::parse(f));
  return read_csv(f, kind);
}

std::vector<double> v_grid() { return g_p.v.empty() ? std::vector<double>{0.25, 0.5, 0.75, 1.0} : g_p.v; }

// ---- sample

GridPath sample_cmd(const std::string& which) {
  RngStream rng(g_common.seed, 0x636c69ULL);
  const std::size_t n = n_or(1024);
  const double dt = g_p.dt.value_or(1.0 / static_cast<double>(n));
  if (which == "obm") return sample_obm(n, g_p.future, dt, rng);
  const HurstContext ctx = context();
  if (which == "levy") return sample_levy_fbm(ctx, n, dt, rng);
  SampleMethod m = SampleMethod::automatic;
  if (g_p.method == "circulant") m = SampleMethod::circulant;
  else if (g_p.method == "cholesky") m = SampleMethod::cholesky;
  else if (g_p.method != "auto") throw DomainError("--method must be auto, circulant or cholesky");
  return sample_fbm(ctx, n, dt, rng, m);
}

// ---- drift

// Past on [-umax, 0] from --in or sampled (fBm for kernel/regression, oBm for obm).
GridPath past_path(const HurstContext& ctx, bool obm) {
  if (!g_p.in.empty()) return read_path(g_p.in, obm ? PathKind::oBm : PathKind::fBm);
  const double dt = g_p.dt.value_or(1.0 / 64.0);
  const auto np = static_cast<std::size_t>(std::llround(g_p.umax.value_or(50.0) / dt));
  RngStream rng(g_common.seed, 0x636c69ULL);
  if (obm) return sample_obm(np, 0, dt, rng);
  return sample_bilateral_fbm(ctx, np, 1, dt, rng).past;
}

void drift_cmd(const std::string& which) {
  const HurstContext ctx = context();
  if (which == "validate") {
    DriftEquivalenceConfig cfg;
    cfg.u_max = g_p.umax.value_or(cfg.u_max);
    cfg.n_pairs = g_p.paths.value_or(cfg.n_pairs);
    cfg.fine = g_p.levels_fine.value_or(cfg.fine);
    if (!g_p.levels.empty()) cfg.levels = g_p.levels;
    cfg.v_grid = v_grid();
    cfg.seed = g_common.seed;
    cfg.threads = g_common.threads;
    emit(drift_equivalence(ctx, cfg));
    return;
  }
  const GridPath past = past_path(ctx, which == "obm");
  QuadratureSpec q;
  q.u_max = past.back_time() - past.t0;
  Trajectory tr;
  if (which == "kernel") tr = drift_apply(DriftKernelSpec{ctx, q}, past, v_grid());
  else if (which == "obm") tr = drift_from_obm(ctx, past, v_grid(), q);
  else tr = drift_regression(ctx, past, v_grid());
  emit_path(tr);
}

// ---- invert

void invert_cmd() {
  const HurstContext ctx = context();
  if (!g_p.in.empty()) {
    const GridPath z = read_path(g_p.in, PathKind::fBm);
    QuadratureSpec q;
    q.u_max = -z.t0;
    const std::vector<double> tg = g_p.t.empty() ? std::vector<double>{z.t0 / 2, z.back_time()} : g_p.t;
    emit_path(pipiras_taqqu_invert(ctx, z, tg, q));
    return;
  }
  RoundTripConfig cfg;
  cfg.u_max = g_p.umax.value_or(cfg.u_max);
  cfg.horizon = g_p.horizon.value_or(cfg.horizon);
  cfg.n_pairs = g_p.paths.value_or(cfg.n_pairs);
  cfg.fine = g_p.levels_fine.value_or(cfg.fine);
  if (!g_p.levels.empty()) cfg.levels = g_p.levels;
  if (!g_p.t.empty()) cfg.t_grid = g_p.t;
  cfg.seed = g_common.seed;
  cfg.threads = g_common.threads;
  emit(inversion_round_trip(ctx, cfg));
}

// ---- gamma

GammaConfig gamma_cfg() {
  GammaConfig g;
  g.ctx = context();
  g.r = g_p.r.value_or(0.1);
  g.validate();
  return g;
}

void gamma_cmd(const std::string& which) {
  const GammaConfig g = gamma_cfg();
  if (which == "cov") {
    const std::size_t n = n_or(8);
    const Eigen::MatrixXd c = gamma_covariance_matrix(g, n);
    ExperimentReport r = make_report("gamma_covariance", {{"hurst", g.ctx.H}, {"r", g.r}, {"n", n}});
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      std::vector<double> row(c.cols());
      for (Eigen::Index j = 0; j < c.cols(); ++j) row[j] = c(i, j);
      r.add_trend("row_" + std::to_string(i), row);
    }
    emit(r);
  } else if (which == "decay") {
    emit(gamma_decay_report(g, n_or(30)));
  } else if (which == "modulus") {
    const std::vector<double> ts = g_p.t.empty() ? std::vector<double>{0.0625, 0.125, 0.25, 0.5, 1.0} : g_p.t;
    ExperimentReport r = make_report("gammahat_modulus", {{"hurst", g.ctx.H}, {"r", g.r}, {"t", ts}});
    std::vector<double> vals;
    for (double t : ts) vals.push_back(gammahat_modulus(g, t));
    r.add_trend("modulus", vals);
    add_value(r, "exponent", two_h_wedge_one(g.ctx));
    add_value(r, "c_e", c_e(g));
    emit(r);
  } else {
    const double T = g_p.horizon.value_or(1.0);
    if (g_p.paths) {
      SupMonteCarloConfig mc;
      mc.n_paths = *g_p.paths;
      mc.seed = g_common.seed;
      mc.threads = g_common.threads;
      emit(reg_gamhat_monte_carlo(g, T, mc));
      return;
    }
    const RegGamhatConstants k = reg_gamhat_constants(g);
    const std::vector<std::size_t> is = g_p.n.empty() ? std::vector<std::size_t>{0, 1, 2, 4, 8} : g_p.n;
    ExperimentReport r = make_report("reg_gamhat_bound", {{"hurst", g.ctx.H}, {"r", g.r}, {"T", T}, {"i", is}});
    for (const auto& [name, v] : {std::pair{"theta", k.theta}, {"c_e", k.c_e}, {"c_c", k.c_c}, {"c_d", k.c_d},
                                  {"c_a", k.c_a}, {"c_b", k.c_b}})
      add_value(r, name, v);
    std::vector<double> b;
    for (std::size_t i : is) b.push_back(reg_gamhat_bound(k, g.r, i, T));
    r.add_trend("bound", b);
    emit(r);
  }
}

// ---- bounds

void bounds_cmd(const std::string& which) {
  if (which == "matrix") {
    const std::vector<std::size_t> ns = g_p.n.empty() ? std::vector<std::size_t>{4, 16, 64} : g_p.n;
    const std::vector<double> es = g_p.eps.empty() ? std::vector<double>{0.01, 0.05, 0.1} : g_p.eps;
    emit(matrix_lemma_report(ns, es, g_p.trials.value_or(1000), g_common.seed, g_common.threads));
  } else if (which == "subgauss") {
    SubGaussianMcConfig cfg;
    cfg.theta = g_p.theta.value_or(cfg.theta);
    cfg.process = sup_process_from_string(g_p.process);
    cfg.hurst = g_p.hurst.value_or(cfg.hurst);
    cfg.n_paths = g_p.paths.value_or(cfg.n_paths);
    if (!g_p.t.empty()) cfg.x_values = g_p.t;
    cfg.seed = g_common.seed;
    cfg.threads = g_common.threads;
    emit(subgaussian_monte_carlo(cfg));
  } else if (which == "thick") {
    const std::size_t N = n_or(1000000);
    const ThickSet s = ThickSet::from_generator(g_p.set, N);
    const DensityTrend d = is_thick_estimate(s);
    const ResidueSplit rs = residue_class_split(s, g_p.k);
    ExperimentReport r = make_report("thick_set", {{"set", s.description()}, {"prefix", N}, {"k", rs.k}});
    add_value(r, "count", static_cast<double>(s.count_below(N)), N);
    add_value(r, "log_slope", d.log_slope);
    add_value(r, "looks_thick", d.looks_thick ? 1.0 : 0.0);
    add_value(r, "harmonic_subsum", harmonic_subsum(s, N));
    add_value(r, "residue_argmax", static_cast<double>(rs.argmax));
    r.add_trend("density_ladder", std::vector<double>(d.ladder.begin(), d.ladder.end()));
    r.add_trend("density", d.density);
    r.add_trend("tail_sup", d.tail_sup);
    r.add_trend("class_density", rs.class_density);
    r.add_check("residue_split_slack", -rs.slack, 0.0, "mean class density + k/n - density must be >= 0");
    if (g_p.p && g_p.p_prime) {
      const NkLadder l = nk_ladder(*g_p.p, *g_p.p_prime, s);
      r.add_trend("nk_n", std::vector<double>(l.n.begin(), l.n.end()));
      r.add_trend("nk_increments", l.increments);
      double short_blocks = 0;
      for (double inc : l.increments) short_blocks += inc < l.p_lo ? 1.0 : 0.0;
      r.add_check("nk_ladder_certified", short_blocks, 0.0, "blocks whose harmonic increment is below p'");
    }
    emit(r);
  } else {
    const auto z = static_cast<unsigned>(g_p.n.size() > 0 ? g_p.n[0] : 6);
    const auto k = static_cast<unsigned>(g_p.n.size() > 1 ? g_p.n[1] : 4);
    const auto n = static_cast<unsigned>(g_p.n.size() > 2 ? g_p.n[2] : 12);
    emit(coding_bound_report(z, k, n));
  }
}

// ---- lil / arbitrage

void lil_cmd() {
  LilConfig cfg;
  cfg.ctx = context();
  cfg.r = g_p.r.value_or(cfg.r);
  cfg.n_paths = g_p.paths.value_or(cfg.n_paths);
  if (!g_p.n.empty()) cfg.i_max_ladder = g_p.n;
  cfg.thick_set = ThickSet::from_generator(g_p.set, cfg.i_max() + 1);
  cfg.seed = g_common.seed;
  cfg.threads = g_common.threads;
  emit(lil_statistic(cfg));
}

ArbitrageConfig arbitrage_cfg() {
  ArbitrageConfig cfg;
  cfg.ctx = context();
  cfg.r = g_p.r.value_or(cfg.r);
  cfg.alpha = g_p.alpha.value_or(cfg.alpha);
  cfg.p = g_p.p.value_or(cfg.p);
  if (!g_p.n.empty()) cfg.n_ladder = g_p.n;
  cfg.n_paths = g_p.paths.value_or(cfg.n_paths);
  cfg.alpha_prime = g_p.alpha_prime;
  cfg.p_prime = g_p.p_prime;
  cfg.r_tilde = g_p.r_tilde;
  cfg.seed = g_common.seed;
  cfg.threads = g_common.threads;
  return cfg;
}

void arbitrage_cmd(const std::string& which) {
  ArbitrageConfig cfg = arbitrage_cfg();
  if (which == "an-prob") {
    emit(a_n_probability(cfg));
  } else if (which == "threshold") {
    if (!cfg.alpha_prime || !cfg.p_prime) throw DomainError("threshold needs --alpha-prime and --p-prime");
    const auto n = n_threshold(cfg.ctx.H, cfg.alpha, *cfg.alpha_prime, cfg.p, *cfg.p_prime);
    ExperimentReport r = make_report("n_threshold", {{"hurst", cfg.ctx.H}, {"alpha", cfg.alpha},
                                                     {"alpha_prime", *cfg.alpha_prime}, {"p", cfg.p},
                                                     {"p_prime", *cfg.p_prime}});
    add_value(r, "n_threshold", static_cast<double>(n));
    emit(r);
  } else {
    std::vector<std::size_t> ns = g_p.n.empty() ? std::vector<std::size_t>{4, 8, 16, 32} : g_p.n;
    std::vector<double> pa = g_p.pa;
    if (pa.empty()) {
      // Upper Wilson limits of P(A'_n) at (alpha', p') from a Monte Carlo run.
      ArbitrageConfig mc = cfg;
      mc.alpha = cfg.alpha_prime.value_or(cfg.alpha);
      mc.p = cfg.p_prime.value_or(cfg.p);
      mc.alpha_prime.reset();
      mc.p_prime.reset();
      mc.n_ladder = ns;
      mc.n_paths = g_p.paths.value_or(100000);
      mc.dual_max_n = 0;
      const ExperimentReport r = a_n_probability(mc);
      for (std::size_t n : ns) pa.push_back(r.find_estimate("P_A_" + std::to_string(n))->ci_high);
    }
    emit(union_bound_ledger(cfg, ns, pa));
  }
}

int selftest_cmd() {
  selftest::Options opt;
  opt.seed = g_common.seed;
  opt.threads = g_common.threads;
  opt.only = g_p.only;
  const auto results = selftest::run(opt, [](const selftest::CriterionResult& r) {
    std::printf("%s\n", selftest::summary_line(r).c_str());
    std::fflush(stdout);
  });
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed() ? 0 : 1;
  const bool ok = failed == 0;
  if (ok)
    std::printf("ALL PASSED: %zu criteria\n", results.size());
  else
    std::printf("FAILED: %zu of %zu criteria\n", failed, results.size());
  if (!g_common.out.empty()) {
    if (g_common.format != "json") throw DomainError("selftest: only --format json is available");
    const fs::path p = resolve_out(g_common.out);
    std::ofstream f(p);
    if (!f) throw DomainError("cannot open output file " + p.string());
    f << selftest::to_json(results, opt, !g_common.no_timing).dump(2) << "\n";
  }
  return ok ? 0 : 1;
}

void add_common(CLI::App& app) {
  app.add_option("--seed", g_common.seed, "RNG seed");
  app.add_option("--threads", g_common.threads, "Worker threads (0 = all cores)");
  app.add_option("--out", g_common.out, "Output file (relative paths go under $FRACDRIFT_OUT_DIR)");
  app.add_option("--format", g_common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--no-timing", g_common.no_timing, "Omit wall time and timestamp from reports");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Brownian motion drift, inversion and arbitrage-event experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; command-line flags take precedence");
  app.option_defaults()->always_capture_default();
  add_common(app);

  auto hurst = [](CLI::App* s) { s->add_option("--hurst", g_p.hurst, "Hurst index in (0, 1)"); };
  auto grid = [](CLI::App* s) {
    s->add_option("--dt", g_p.dt, "Grid step");
    s->add_option("--umax", g_p.umax, "Past window length");
  };
  auto ns = [](CLI::App* s, const char* help) { s->add_option("--n", g_p.n, help)->delimiter(','); };
  auto paths = [](CLI::App* s, const char* help) { s->add_option("--paths", g_p.paths, help); };
  auto levels = [](CLI::App* s) {
    s->add_option("--fine", g_p.levels_fine, "Co-simulation grid 1/fine");
    s->add_option("--levels", g_p.levels, "Coarse grids 1/L, comma separated")->delimiter(',');
  };

  std::string leaf;
  auto leaf_cmd = [&leaf](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* s = parent->add_subcommand(name, help);
    s->callback([&leaf, name] { leaf = name; });
    return s;
  };

  CLI::App* sample = app.add_subcommand("sample", "Sample a path on a uniform grid")->require_subcommand(1);
  for (const char* w : {"fbm", "levy", "obm"}) {
    CLI::App* s = leaf_cmd(sample, w, std::string("Sample ") + w);
    if (std::string(w) != "obm") hurst(s);
    ns(s, "Number of steps (past steps for obm)");
    s->add_option("--dt", g_p.dt, "Grid step (default 1/n)");
    if (std::string(w) == "fbm") s->add_option("--method", g_p.method, "auto, circulant or cholesky");
    if (std::string(w) == "obm") s->add_option("--future", g_p.future, "Future steps");
  }

  CLI::App* drift = app.add_subcommand("drift", "Drift of the future given the past")->require_subcommand(1);
  for (const char* w : {"kernel", "obm", "regression", "validate"}) {
    CLI::App* s = leaf_cmd(drift, w,
                           std::string(w) == "validate" ? "Kernel drift vs oBm-side drift on joint samples"
                                                        : std::string("Drift by the ") + w + " method");
    hurst(s);
    grid(s);
    s->add_option("--v", g_p.v, "Future times, comma separated")->delimiter(',');
    if (std::string(w) == "validate") {
      paths(s, "Number of joint pairs");
      levels(s);
    } else {
      s->add_option("--in", g_p.in, "Past path (CSV or JSON); sampled when absent");
    }
  }

  CLI::App* invert = app.add_subcommand("invert", "Recover the driving oBm from an fBm path, or run the round trip");
  invert->callback([&leaf] { leaf = "invert"; });
  hurst(invert);
  invert->add_option("--in", g_p.in, "Two-sided fBm path (CSV or JSON)");
  invert->add_option("--t", g_p.t, "Output times, comma separated")->delimiter(',');
  invert->add_option("--umax", g_p.umax, "Past window of the round trip");
  invert->add_option("--horizon", g_p.horizon, "Future window of the round trip");
  paths(invert, "Number of round-trip pairs");
  levels(invert);

  CLI::App* gamma = app.add_subcommand("gamma", "The Gamma field")->require_subcommand(1);
  for (const char* w : {"cov", "decay", "modulus", "regbound"}) {
    CLI::App* s = leaf_cmd(gamma, w, std::string("Gamma ") + w);
    hurst(s);
    s->add_option("--r", g_p.r, "Scale ratio in (0, 1)");
    if (std::string(w) == "cov") ns(s, "Matrix size");
    if (std::string(w) == "decay") ns(s, "Largest lag");
    if (std::string(w) == "modulus") s->add_option("--t", g_p.t, "Lags, comma separated")->delimiter(',');
    if (std::string(w) == "regbound") {
      ns(s, "Indices i");
      s->add_option("--horizon", g_p.horizon, "Window T");
      paths(s, "Run the sup Monte Carlo with this many paths");
    }
  }

  CLI::App* bounds = app.add_subcommand("bounds", "Bounds toolkit")->require_subcommand(1);
  {
    CLI::App* s = leaf_cmd(bounds, "matrix", "Almost-diagonal matrix bounds on random and adversarial instances");
    ns(s, "Matrix sizes");
    s->add_option("--eps", g_p.eps, "Off-diagonal scales")->delimiter(',');
    s->add_option("--trials", g_p.trials, "Random instances per configuration");
    s = leaf_cmd(bounds, "subgauss", "Sub-Gaussian sup bound against Monte Carlo");
    s->add_option("--theta", g_p.theta, "Hoelder exponent in (0, 1]");
    s->add_option("--process", g_p.process, "brownian, fbm or linear");
    hurst(s);
    paths(s, "Number of paths");
    s->add_option("--t", g_p.t, "Levels x, comma separated")->delimiter(',');
    s = leaf_cmd(bounds, "thick", "Density diagnostics of a subset of N");
    s->add_option("--set", g_p.set, "naturals, evens, odds, squares, multiples:K, residue:K:L, blocks, bernoulli:P:SEED");
    ns(s, "Prefix length");
    s->add_option("--k", g_p.k, "Residue classes");
    s->add_option("--p", g_p.p, "Upper density level of the n_k ladder");
    s->add_option("--p-prime", g_p.p_prime, "Lower density level of the n_k ladder");
    s = leaf_cmd(bounds, "hk-count", "Word-coding count against its bound");
    ns(s, "max |z|, max k, max n");
  }

  CLI::App* lil = app.add_subcommand("lil", "Normalised minimum of Levy fBm along r^i");
  lil->callback([&leaf] { leaf = "lil"; });
  hurst(lil);
  lil->add_option("--r", g_p.r, "Scale ratio");
  paths(lil, "Number of paths");
  ns(lil, "i_max ladder");
  lil->add_option("--set", g_p.set, "Index set (see bounds thick)");

  CLI::App* arb = app.add_subcommand("arbitrage", "Arbitrage events A_n")->require_subcommand(1);
  for (const char* w : {"an-prob", "ledger", "threshold"}) {
    CLI::App* s = leaf_cmd(arb, w, std::string("arbitrage ") + w);
    hurst(s);
    s->add_option("--r", g_p.r, "Scale ratio");
    s->add_option("--alpha", g_p.alpha, "Level alpha");
    s->add_option("--p", g_p.p, "Frequency p");
    s->add_option("--alpha-prime", g_p.alpha_prime, "alpha'");
    s->add_option("--p-prime", g_p.p_prime, "p'");
    if (std::string(w) != "threshold") {
      ns(s, "n ladder");
      paths(s, "Monte Carlo samples");
    }
    if (std::string(w) == "ledger") {
      s->add_option("--r-tilde", g_p.r_tilde, "r tilde");
      s->add_option("--pa", g_p.pa, "Estimates of P(A'_n), one per n (Monte Carlo when absent)")->delimiter(',');
    }
  }

  CLI::App* st = app.add_subcommand("selftest", "Run the acceptance suite");
  st->callback([&leaf] { leaf = "selftest"; });
  st->add_option("--only", g_p.only, "Criterion ids, comma separated")->delimiter(',');

  // Global flags may follow the subcommand.
  std::function<void(CLI::App*)> fall = [&fall](CLI::App* a) {
    for (CLI::App* s : a->get_subcommands({})) {
      s->fallthrough();
      fall(s);
    }
  };
  fall(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (app.get_option("--format")->count() == 0 && fs::path(g_common.out).extension() == ".csv")
    g_common.format = "csv";

  try {
    const std::string parent = app.get_subcommands().front()->get_name();
    if (parent == "sample") emit_path(sample_cmd(leaf));
    else if (parent == "drift") drift_cmd(leaf);
    else if (parent == "invert") invert_cmd();
    else if (parent == "gamma") gamma_cmd(leaf);
    else if (parent == "bounds") bounds_cmd(leaf);
    else if (parent == "lil") lil_cmd();
    else if (parent == "arbitrage") arbitrage_cmd(leaf);
    else return selftest_cmd();
  } catch (const AccuracyError& e) {
    std::fprintf(stderr, "accuracy error: %s (estimate %g)\n", e.what(), e.estimate());
    return kExitAccuracy;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
