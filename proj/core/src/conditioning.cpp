#include "fracdrift/conditioning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "fracdrift/errors.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/stats.hpp"

namespace fracdrift {

void ConditioningConfig::validate() const {
  if (!(dt > 0.0) || !(u_max > 0.0)) throw DomainError("conditioning: dt and u_max must be positive");
  if (v_grid.empty()) throw DomainError("conditioning: v_grid must be non-empty");
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    if (!(v_grid[i] > 0.0)) throw DomainError("conditioning: v_grid entries must be positive");
    if (i > 0 && !(v_grid[i] > v_grid[i - 1])) throw DomainError("conditioning: v_grid must be ascending");
    const double k = v_grid[i] / dt;
    if (std::abs(k - std::round(k)) > 1e-9 * k) throw DomainError("conditioning: v_grid entries must be grid nodes");
  }
  if (n_paths < 2) throw DomainError("conditioning: need at least two paths");
  if (!(familywise_alpha > 0.0 && familywise_alpha < 1.0)) throw DomainError("conditioning: alpha must lie in (0, 1)");
}

std::vector<std::size_t> probe_nodes(std::size_t n_nodes, std::size_t n_probes) {
  const std::size_t last = n_nodes - 1;  // index of t = 0
  std::vector<std::size_t> lags;
  if (n_probes == 0 || last == 0) return {};
  const double g = std::pow(static_cast<double>(last), 1.0 / static_cast<double>(std::max<std::size_t>(n_probes - 1, 1)));
  double x = 1.0;
  for (std::size_t i = 0; i < n_probes; ++i, x *= g) {
    const auto lag = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(x)), 1, last);
    if (lags.empty() || lag > lags.back()) lags.push_back(lag);
  }
  std::vector<std::size_t> idx;
  for (std::size_t lag : lags) idx.push_back(last - lag);
  return idx;
}

ResidualMoments exact_residual_moments(const HurstContext& ctx, const PastWeights& w,
                                       const std::vector<std::size_t>& probes) {
  const std::size_t n = w.n_nodes, m = w.rows.size();
  const double two_h = 2.0 * ctx.H;
  std::vector<double> t(n), pt(n), plag(n);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = -static_cast<double>(n - 1 - k) * w.dt;
    pt[k] = std::pow(std::abs(t[k]), two_h);
    plag[k] = std::pow(static_cast<double>(k) * w.dt, two_h);
  }
  // (Sigma w)_j = (pt_j S + sum_k w_k pt_k - sum_k w_k plag_|j-k|) / 2 with S = sum_k w_k.
  std::vector<std::vector<double>> sw(m, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < m; ++a) {
    const std::vector<double>& wa = w.rows[a];
    double S = 0.0, P = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      S += wa[k];
      P += wa[k] * pt[k];
    }
    for (std::size_t j = 0; j < n; ++j) {
      double toe = 0.0;
      for (std::size_t k = 0; k < n; ++k) toe += wa[k] * plag[j > k ? j - k : k - j];
      sw[a][j] = 0.5 * (pt[j] * S + P - toe);
    }
  }
  ResidualMoments out;
  out.cov.resize(m, m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double va = w.v_grid[a], vb = w.v_grid[b];
      double cab = 0.0, cba = 0.0, quad_form = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        cab += w.rows[a][k] * fbm_cov(ctx, t[k], vb);
        cba += w.rows[b][k] * fbm_cov(ctx, t[k], va);
        quad_form += w.rows[a][k] * sw[b][k];
      }
      out.cov(a, b) = out.cov(b, a) = fbm_cov(ctx, va, vb) - cab - cba + quad_form;
    }
  }
  out.cross.resize(m, probes.size());
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t p = 0; p < probes.size(); ++p)
      out.cross(a, p) = fbm_cov(ctx, w.v_grid[a], t[probes[p]]) - sw[a][probes[p]];
  return out;
}

ExperimentReport validate_conditioning(const HurstContext& ctx, const ConditioningConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_past = static_cast<std::size_t>(std::llround(cfg.u_max / cfg.dt));
  const std::size_t n_nodes = n_past + 1;
  const std::size_t m = cfg.v_grid.size();
  std::vector<std::size_t> v_idx;
  for (double v : cfg.v_grid) v_idx.push_back(static_cast<std::size_t>(std::llround(v / cfg.dt)));
  const std::size_t n_future = v_idx.back();

  QuadratureSpec quad;
  quad.u_max = static_cast<double>(n_past) * cfg.dt;
  auto table = std::make_shared<const DriftKernelTable>(DriftKernelSpec{ctx, quad});
  const DriftOperator op(table, cfg.dt, n_nodes, cfg.v_grid);
  const std::vector<std::size_t> probes = probe_nodes(n_nodes, cfg.n_probes);
  const ResidualMoments exact = exact_residual_moments(ctx, op.weights(), probes);

  Eigen::MatrixXd levy(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b <= a; ++b) levy(a, b) = levy(b, a) = levy_cov(ctx, cfg.v_grid[a], cfg.v_grid[b]);

  const FbmSampler sampler(ctx, n_past + n_future, cfg.dt);
  const RngStream root(cfg.seed, 0x636f6e64ULL);
  const std::size_t dim = m + probes.size();
  SecondMoments acc = chunked_reduce(
      cfg.n_paths, 256, cfg.threads, [dim] { return SecondMoments(dim); },
      [&](SecondMoments& s, std::size_t path) {
        RngStream rng = root.substream(path);
        const BilateralPath bp = split_bilateral(sampler.sample(rng), n_past);
        std::vector<double> x(dim, 0.0);
        std::vector<double> drift(m, 0.0);
        if (!cfg.omit_drift) drift = op.weights().apply(bp.past.values);
        for (std::size_t a = 0; a < m; ++a) x[a] = bp.future.values[v_idx[a]] - drift[a];
        for (std::size_t p = 0; p < probes.size(); ++p) x[m + p] = bp.past.values[probes[p]];
        s.add(x);
      });

  const Eigen::MatrixXd c = acc.covariance();
  const Eigen::MatrixXd se = acc.std_errors();
  const std::size_t n_tests_cov = m * (m + 1) / 2, n_tests_cross = m * probes.size();
  const double thr = bonferroni_threshold(n_tests_cov + n_tests_cross, cfg.familywise_alpha);

  ExperimentReport rep;
  rep.name = cfg.omit_drift ? "conditioning_negative_control" : "conditioning";
  rep.seed = cfg.seed;
  rep.config = {{"hurst", ctx.H},       {"dt", cfg.dt},         {"u_max", quad.u_max},
                {"v_grid", cfg.v_grid}, {"n_paths", cfg.n_paths}, {"n_probes", probes.size()},
                {"omit_drift", cfg.omit_drift}, {"familywise_alpha", cfg.familywise_alpha}};

  double worst_cov = 0.0, worst_budget = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double budget = std::abs(exact.cov(a, b) - levy(a, b));
      const double z = (std::abs(c(a, b) - levy(a, b)) - budget) / se(a, b);
      worst_cov = std::max(worst_cov, z);
      worst_budget = std::max(worst_budget, budget / levy(a, b));
      const std::string tag = "residual_cov[" + format_double(cfg.v_grid[a]) + "," + format_double(cfg.v_grid[b]) + "]";
      rep.add_estimate(tag, c(a, b), c(a, b) - thr * se(a, b), c(a, b) + thr * se(a, b), acc.count());
      rep.add_estimate("levy_" + tag, levy(a, b), levy(a, b) - budget, levy(a, b) + budget, 0);
    }
  }
  double worst_cross = 0.0, worst_bias = 0.0;
  std::vector<double> cross_z;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double s = std::sqrt(c(a, a) * c(m + p, m + p) + c(a, m + p) * c(a, m + p)) /
                       std::sqrt(static_cast<double>(acc.count()));
      const double z = std::abs(c(a, m + p)) / s;
      cross_z.push_back(z);
      worst_cross = std::max(worst_cross, z);
      worst_bias = std::max(worst_bias, std::abs(exact.cross(a, p)) / s);
    }
  }
  rep.add_trend("cross_cov_z", cross_z);
  rep.add_estimate("relative_discretization_budget", worst_budget, worst_budget, worst_budget, 0);
  rep.add_estimate("cross_cov_bias_in_se", worst_bias, worst_bias, worst_bias, 0);
  rep.add_check("residual_cov_matches_levy", worst_cov, thr,
                "max over (v,v') of (|cov - levy_cov| - budget) / SE");
  rep.add_check("residual_uncorrelated_with_past", worst_cross, thr, "max over (v, past node) of |cov| / SE");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

}  // namespace fracdrift
