#include "fracdrift/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <string>

#include "fracdrift/errors.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/prediction.hpp"
#include "fracdrift/stats.hpp"

namespace fracdrift {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Every f-th node of p up to index `last`.
GridPath subsample(const GridPath& p, std::size_t f, std::size_t last) {
  GridPath q;
  q.t0 = p.t0;
  q.dt = p.dt * static_cast<double>(f);
  q.kind = p.kind;
  for (std::size_t k = 0; k <= last; k += f) q.values.push_back(p.values[k]);
  return q;
}

void check_levels(const std::vector<std::size_t>& levels, std::size_t fine, const char* what) {
  if (levels.empty()) throw DomainError(std::string(what) + ": levels must not be empty");
  for (std::size_t L : levels)
    if (L == 0 || fine % L != 0) throw DomainError(std::string(what) + ": every level must divide the fine grid");
}

// Per-level sums of squared differences and squared references, merged in chunk order.
struct ErrAcc {
  std::vector<double> err, ref;
  double max_abs = 0.0;
  explicit ErrAcc(std::size_t k = 0) : err(k, 0.0), ref(k, 0.0) {}
  void merge(const ErrAcc& o) {
    for (std::size_t i = 0; i < err.size(); ++i) {
      err[i] += o.err[i];
      ref[i] += o.ref[i];
    }
    max_abs = std::max(max_abs, o.max_abs);
  }
};

}  // namespace

void CovarianceFidelityConfig::validate() const {
  if (n_points < 1) throw DomainError("covariance_fidelity: need at least one point");
  if (!(dt > 0.0)) throw DomainError("covariance_fidelity: dt must be positive");
  if (n_paths < 2) throw DomainError("covariance_fidelity: need at least 2 paths");
}

ExperimentReport covariance_fidelity(const HurstContext& ctx, const CovarianceFidelityConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = cfg.n_points;
  const FbmSampler fbm(ctx, m, cfg.dt);
  const LevyFbmSampler levy(ctx, m, cfg.dt);

  ExperimentReport rep;
  rep.name = "covariance_fidelity";
  rep.seed = cfg.seed;
  rep.config = {{"hurst", ctx.H}, {"n_points", m}, {"dt", cfg.dt}, {"n_paths", cfg.n_paths},
                {"fbm_method", fbm.method() == SampleMethod::circulant ? "circulant" : "cholesky"}};
  const std::size_t tests = m * (m + 1) / 2;
  const double thr = bonferroni_threshold(tests, cfg.familywise_alpha);

  for (int kind = 0; kind < 2; ++kind) {
    const RngStream root(cfg.seed, kind == 0 ? 0x66626d31ULL : 0x6c657679ULL);
    const SecondMoments acc = chunked_reduce(
        cfg.n_paths, 256, cfg.threads, [m] { return SecondMoments(m); },
        [&](SecondMoments& s, std::size_t path) {
          RngStream rng = root.substream(path);
          const GridPath p = kind == 0 ? fbm.sample(rng) : levy.sample(rng);
          s.add(std::span<const double>(p.values).subspan(1));
        });
    const Eigen::MatrixXd c = acc.covariance(), se = acc.std_errors();
    const Eigen::MatrixXd& lc = levy.covariance().entries();
    double worst = 0.0;
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double ti = cfg.dt * static_cast<double>(i + 1), tj = cfg.dt * static_cast<double>(j + 1);
        const double exact = kind == 0 ? fbm_cov(ctx, ti, tj) : lc(i, j);
        const double z = std::abs(c(i, j) - exact) / se(i, j);
        if (z > worst) {
          worst = z;
          wi = i;
          wj = j;
        }
      }
    const std::string tag = kind == 0 ? "fbm" : "levy";
    const double last = c(m - 1, m - 1);
    rep.add_estimate(tag + "_var_at_end", last, last - 4.0 * se(m - 1, m - 1), last + 4.0 * se(m - 1, m - 1),
                     acc.count());
    rep.add_check(tag + "_cov_matches", worst, thr,
                  "max |empirical - exact| / SE over " + std::to_string(tests) + " entries, worst at (" +
                      std::to_string(wi) + "," + std::to_string(wj) + ")");
  }
  rep.wall_time = seconds_since(start);
  rep.stamp_now();
  return rep;
}

void DriftEquivalenceConfig::validate() const {
  if (!(u_max > 0.0)) throw DomainError("drift_equivalence: u_max must be positive");
  check_levels(levels, fine, "drift_equivalence");
  if (v_grid.empty()) throw DomainError("drift_equivalence: v_grid must not be empty");
  for (double v : v_grid)
    if (!(v > 0.0)) throw DomainError("drift_equivalence: v must be positive");
  if (n_pairs < 1) throw DomainError("drift_equivalence: need at least one pair");
}

ExperimentReport drift_equivalence(const HurstContext& ctx, const DriftEquivalenceConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  QuadratureSpec q;
  q.u_max = cfg.u_max;
  const auto table = std::make_shared<const DriftKernelTable>(DriftKernelSpec{ctx, q});
  const std::size_t n_fine = static_cast<std::size_t>(std::llround(cfg.u_max * static_cast<double>(cfg.fine)));
  const std::size_t K = cfg.levels.size();
  std::vector<DriftOperator> kernel_ops;
  std::vector<ObmDriftOperator> obm_ops;
  for (std::size_t L : cfg.levels) {
    const std::size_t n = n_fine / (cfg.fine / L) + 1;
    kernel_ops.emplace_back(table, 1.0 / static_cast<double>(L), n, cfg.v_grid);
    obm_ops.emplace_back(ctx, 1.0 / static_cast<double>(L), n, cfg.v_grid, q);
  }
  const Cosimulator cosim(ctx, n_fine + 1, 1.0 / static_cast<double>(cfg.fine));
  const RngStream root(cfg.seed, 0x64726966ULL);

  const ErrAcc acc = chunked_reduce(
      cfg.n_pairs, 4, cfg.threads, [K] { return ErrAcc(K); },
      [&](ErrAcc& a, std::size_t pair) {
        RngStream rng = root.substream(pair);
        const GridPath w = sample_obm(n_fine, 0, 1.0 / static_cast<double>(cfg.fine), rng);
        const GridPath z = cosim.fbm_from_obm(w);
        for (std::size_t k = 0; k < K; ++k) {
          const std::size_t f = cfg.fine / cfg.levels[k];
          const auto dz = kernel_ops[k].apply(subsample(z, f, n_fine)).values;
          const auto dw = obm_ops[k].apply(subsample(w, f, n_fine)).values;
          for (std::size_t i = 0; i < dz.size(); ++i) {
            a.err[k] += (dz[i] - dw[i]) * (dz[i] - dw[i]);
            a.ref[k] += dw[i] * dw[i];
          }
        }
      });

  ExperimentReport rep;
  rep.name = "drift_equivalence";
  rep.seed = cfg.seed;
  rep.config = {{"hurst", ctx.H},       {"u_max", cfg.u_max}, {"fine", cfg.fine},
                {"levels", cfg.levels}, {"v_grid", cfg.v_grid}, {"n_pairs", cfg.n_pairs}};
  std::vector<double> rel;
  for (std::size_t k = 0; k < K; ++k) {
    const double e = std::sqrt(acc.err[k] / acc.ref[k]);
    rel.push_back(e);
    rep.add_estimate("relative_l2_h_1_" + std::to_string(cfg.levels[k]), e, e, e, cfg.n_pairs);
  }
  rep.add_trend("relative_l2", rel);
  rep.add_check("default_grid_error", rel.front(), cfg.default_limit, "relative L2 error at the default grid");
  rep.add_check("refined_grid_error", rel.back(), cfg.refined_limit, "relative L2 error at the refined grid");
  double up = 0.0;
  for (std::size_t k = 1; k < K; ++k) up += rel[k] >= rel[k - 1] ? 1.0 : 0.0;
  rep.add_check("error_decreases", up, 0.0, "refinement steps where the error does not strictly decrease");
  rep.wall_time = seconds_since(start);
  rep.stamp_now();
  return rep;
}

void RoundTripConfig::validate() const {
  if (!(u_max > 0.0) || !(horizon >= 0.0)) throw DomainError("inversion_round_trip: need u_max > 0, horizon >= 0");
  check_levels(levels, fine, "inversion_round_trip");
  if (t_grid.empty()) throw DomainError("inversion_round_trip: t_grid must not be empty");
  for (double t : t_grid)
    if (!(t >= -u_max && t <= horizon)) throw DomainError("inversion_round_trip: t_grid outside the window");
  if (n_pairs < 1) throw DomainError("inversion_round_trip: need at least one pair");
}

ExperimentReport inversion_round_trip(const HurstContext& ctx, const RoundTripConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  QuadratureSpec q;
  q.u_max = cfg.u_max;
  const double fine = static_cast<double>(cfg.fine);
  const std::size_t np = static_cast<std::size_t>(std::llround(cfg.u_max * fine));
  const std::size_t nf = static_cast<std::size_t>(std::llround(cfg.horizon * fine));
  const std::size_t K = cfg.levels.size();
  std::vector<InversionOperator> ops;
  for (std::size_t L : cfg.levels) {
    const std::size_t n = (np + nf) / (cfg.fine / L) + 1;
    ops.emplace_back(ctx, -cfg.u_max, 1.0 / static_cast<double>(L), n, cfg.t_grid, q);
  }
  const Cosimulator cosim(ctx, np + nf + 1, 1.0 / fine);
  const RngStream root(cfg.seed, 0x696e7672ULL);

  const ErrAcc acc = chunked_reduce(
      cfg.n_pairs, 4, cfg.threads, [K] { return ErrAcc(K); },
      [&](ErrAcc& a, std::size_t pair) {
        RngStream rng = root.substream(pair);
        const GridPath w = sample_obm(np, nf, 1.0 / fine, rng);
        const GridPath z = cosim.fbm_from_obm(w);
        std::vector<double> truth;
        for (double t : cfg.t_grid) truth.push_back(w.values[w.index_of(t)]);
        for (std::size_t k = 0; k < K; ++k) {
          const auto back = ops[k].apply(subsample(z, cfg.fine / cfg.levels[k], np + nf)).values;
          for (std::size_t i = 0; i < back.size(); ++i) {
            const double d = back[i] - truth[i];
            a.err[k] += d * d;
            a.ref[k] += truth[i] * truth[i];
            a.max_abs = std::max(a.max_abs, std::abs(d));
          }
        }
      });

  ExperimentReport rep;
  rep.name = "inversion_round_trip";
  rep.seed = cfg.seed;
  rep.config = {{"hurst", ctx.H},       {"u_max", cfg.u_max},   {"horizon", cfg.horizon}, {"fine", cfg.fine},
                {"levels", cfg.levels}, {"t_grid", cfg.t_grid}, {"n_pairs", cfg.n_pairs}};
  std::vector<double> rel;
  for (std::size_t k = 0; k < K; ++k) {
    const double e = std::sqrt(acc.err[k] / acc.ref[k]);
    rel.push_back(e);
    rep.add_estimate("relative_l2_h_1_" + std::to_string(cfg.levels[k]), e, e, e, cfg.n_pairs);
  }
  rep.add_trend("relative_l2", rel);
  rep.add_estimate("max_abs_error", acc.max_abs, acc.max_abs, acc.max_abs, cfg.n_pairs);
  if (ctx.eta == 0.0)
    rep.add_check("exact_at_half", acc.max_abs, cfg.exact_tol, "max |W_back - W| at H = 1/2");
  else
    rep.add_check("default_grid_error", rel.front(), cfg.limit, "relative L2 error at the default grid");
  rep.wall_time = seconds_since(start);
  rep.stamp_now();
  return rep;
}

}  // namespace fracdrift
