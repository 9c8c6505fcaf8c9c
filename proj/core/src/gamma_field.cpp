#include "fracdrift/gamma_field.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Dense>

#include "fracdrift/cov_matrix.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/grid_path.hpp"
#include "fracdrift/noise_functionals.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/stats.hpp"
#include "fracdrift/subgaussian.hpp"
#include "fracdrift/xi.hpp"

namespace fracdrift {

using detail::xi_signed;

void GammaConfig::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("gamma: r must lie in (0, 1)");
  if (n < 1) throw DomainError("gamma: n must be at least 1");
  quad.validate();
}

namespace {

// int_0^inf xi_eta(x, a) xi_eta(x, b) dx for 0 < a <= b.
double xi_product_integral(double eta, double a, double b, const QuadratureSpec& spec) {
  if (eta == 0.0) return 0.0;
  auto f = [eta, a, b](double x) { return xi_signed(eta, x, a) * xi_signed(eta, x, b); };
  QuadResult res = quad::graded(f, 0.0, a, Endpoint::left, spec);
  if (b > a) {
    const int extra = static_cast<int>(std::ceil(std::log2(b / a)));
    res += quad::graded(f, a, b, Endpoint::left, spec, extra);
  }
  res += quad::half_line(f, b, b, false, spec);
  return quad::checked(res, spec, "gamma_cov").value;
}

double hoelder_exponent(const HurstContext& ctx) { return two_h_wedge_one(ctx); }

}  // namespace

double gamma_cov(const GammaConfig& cfg, std::size_t i, std::size_t j) {
  cfg.validate();
  const double d = static_cast<double>(i > j ? i - j : j - i);
  const double rho = std::pow(cfg.r, d);
  return std::pow(cfg.r, -d * cfg.ctx.H) * xi_product_integral(cfg.ctx.eta, rho, 1.0, cfg.quad);
}

double gamma_cov_direct(const GammaConfig& cfg, std::size_t i, std::size_t j) {
  cfg.validate();
  const double ri = std::pow(cfg.r, static_cast<double>(i)), rj = std::pow(cfg.r, static_cast<double>(j));
  const double scale = std::pow(cfg.r, -static_cast<double>(i + j) * cfg.ctx.H);
  return scale * xi_product_integral(cfg.ctx.eta, std::min(ri, rj), std::max(ri, rj), cfg.quad);
}

double gamma_variance(const GammaConfig& cfg) { return gamma_cov(cfg, 0, 0); }

GammaCovariance decay_bound_check(const GammaConfig& cfg, std::size_t d_max) {
  if (d_max < 1) throw DomainError("decay_bound_check: d_max must be at least 1");
  GammaCovariance out;
  const double expo = 0.5 - std::abs(cfg.ctx.eta);
  for (std::size_t d = 0; d <= d_max; ++d) {
    const double c = gamma_cov(cfg, 0, d);
    out.cov.push_back(c);
    out.scaled.push_back(std::abs(c) * std::pow(cfg.r, -expo * static_cast<double>(d)));
  }
  out.sigma2 = out.cov[0];
  for (double c : out.cov) out.rho.push_back(out.sigma2 > 0.0 ? c / out.sigma2 : 0.0);
  out.cf_fit = *std::max_element(out.scaled.begin(), out.scaled.end());
  for (std::size_t d = 1; d <= d_max; ++d)
    out.eps = std::max(out.eps, std::pow(std::abs(out.rho[d]), 1.0 / static_cast<double>(d)));

  // Trend over the upper half of lags: log-linear slope and total relative change.
  const std::size_t d0 = std::max<std::size_t>(1, d_max / 2);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
  bool finite = true;
  for (std::size_t d = d0; d <= d_max; ++d) {
    if (!(out.scaled[d] > 0.0)) {
      finite = false;
      continue;
    }
    const double x = static_cast<double>(d), y = std::log(out.scaled[d]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1.0;
  }
  out.tail_slope = n > 1.0 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  out.tail_change = out.cf_fit > 0.0 ? std::abs(out.scaled[d_max] - out.scaled[d0]) / out.cf_fit : 0.0;
  out.bounded = finite && std::isfinite(out.cf_fit);
  return out;
}

ExperimentReport gamma_decay_report(const GammaConfig& cfg, std::size_t d_max, double slope_tol) {
  const auto start = std::chrono::steady_clock::now();
  const GammaCovariance g = decay_bound_check(cfg, d_max);
  ExperimentReport rep;
  rep.name = "gamma_decay";
  rep.config = {{"hurst", cfg.ctx.H}, {"r", cfg.r}, {"d_max", d_max}, {"slope_tol", slope_tol}};
  rep.add_estimate("sigma2", g.sigma2, g.sigma2, g.sigma2, 0);
  rep.add_estimate("cf_fit", g.cf_fit, g.cf_fit, g.cf_fit, 0);
  rep.add_estimate("eps", g.eps, g.eps, g.eps, 0);
  rep.add_estimate("tail_change", g.tail_change, g.tail_change, g.tail_change, 0);
  // Diagnostic only: last value plus the geometric continuation of the last two increments.
  const std::size_t m = g.scaled.size();
  if (m >= 3) {
    const double d1 = g.scaled[m - 1] - g.scaled[m - 2], d0 = g.scaled[m - 2] - g.scaled[m - 3];
    const double q = d0 != 0.0 ? d1 / d0 : 0.0;
    const double lim = q > 0.0 && q < 1.0 ? g.scaled[m - 1] + d1 * q / (1.0 - q) : g.scaled[m - 1];
    rep.add_estimate("extrapolated_limit", lim, lim, lim, 0);
  }
  rep.add_trend("cov", g.cov);
  rep.add_trend("rho", g.rho);
  rep.add_trend("scaled", g.scaled);
  rep.add_check("scaled_cov_bounded", g.bounded ? 0.0 : 1.0, 0.0, "1 if any scaled covariance is non-finite");
  rep.add_check("no_increasing_trend", g.tail_slope, slope_tol, "least-squares slope of log scaled over upper lags");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

double gammahat_modulus(const GammaConfig& cfg, double t) {
  if (!(t > 0.0)) throw DomainError("gammahat_modulus: t must be positive");
  const double eta = cfg.ctx.eta;
  if (eta == 0.0) return 0.0;
  const QuadratureSpec& q = cfg.quad;
  auto near = [eta](double x) {
    const double v = xi_signed(eta, x, 1.0);
    return v * v;
  };
  auto far = [eta, t](double y) {
    const double v = xi_signed(eta, y + 1.0, t) - xi_signed(eta, y, t);
    return v * v;
  };
  QuadResult res = quad::graded(near, 0.0, t, Endpoint::left, q);
  res += quad::graded(far, 0.0, t, Endpoint::left, q);
  res += quad::half_line(far, t, t, false, q);
  return quad::checked(res, q, "gammahat_modulus").value;
}

double gammahat_autocov(const GammaConfig& cfg, double tau) {
  if (tau == 0.0) return gamma_variance(cfg);
  return gamma_variance(cfg) - 0.5 * gammahat_modulus(cfg, std::abs(tau));
}

double c_e(const GammaConfig& cfg, int k_max) {
  const double a = hoelder_exponent(cfg.ctx);
  double best = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const double t = std::ldexp(1.0, -k);
    best = std::max(best, gammahat_modulus(cfg, t) / std::pow(t, a));
  }
  return best;
}

RegGamhatConstants reg_gamhat_constants(const GammaConfig& cfg) {
  RegGamhatConstants k;
  k.theta = std::min(cfg.ctx.H, 0.5);
  const SubGaussianConstants s = subgaussian_constants(k.theta);
  k.c_e = c_e(cfg);
  k.c_c = s.c_c;
  k.c_d = s.c_d;
  if (!(k.c_e > 0.0)) throw DomainError("reg_gamhat_constants: undefined at H = 1/2 (zero modulus)");
  k.c_a = k.c_c / k.c_e;
  k.c_b = std::max(k.c_d, std::exp(k.c_a));
  return k;
}

double reg_gamhat_bound(const RegGamhatConstants& k, double r, std::size_t i, double T) {
  if (!(T > 0.0)) throw DomainError("reg_gamhat_bound: T must be positive");
  const double a = k.theta < 0.5 ? 2.0 * k.theta : 1.0;
  const double x = std::pow(r, static_cast<double>(i)) / T;
  return k.c_b * std::exp(-k.c_a * std::pow(x, a));
}

double reg_gamhat_bound(const GammaConfig& cfg, std::size_t i, double T) {
  cfg.validate();
  return reg_gamhat_bound(reg_gamhat_constants(cfg), cfg.r, i, T);
}

std::function<double(double)> gamma_kernel(const GammaConfig& cfg, std::size_t i) {
  const double eta = cfg.ctx.eta;
  const double ri = std::pow(cfg.r, static_cast<double>(i));
  const double scale = std::pow(cfg.r, -static_cast<double>(i) * cfg.ctx.H);
  return [eta, ri, scale](double s) { return s < 0.0 ? scale * xi_signed(eta, -s, ri) : 0.0; };
}

std::function<double(double)> gammahat_kernel(const GammaConfig& cfg, double t) {
  const double eta = cfg.ctx.eta;
  return [eta, t](double s) { return s < t ? xi_signed(eta, t - s, 1.0) : 0.0; };
}

ExperimentReport gamma_monte_carlo(const GammaConfig& cfg, const GammaMonteCarloConfig& mc) {
  cfg.validate();
  if (!(mc.modulus_t > 0.0)) throw DomainError("gamma_monte_carlo: modulus_t must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = mc.d_max + 1;
  std::vector<std::function<double(double)>> kernels;
  for (std::size_t d = 0; d < m; ++d) kernels.push_back(gamma_kernel(cfg, d));
  const auto kt = gammahat_kernel(cfg, mc.modulus_t), k0 = gammahat_kernel(cfg, 0.0);
  kernels.push_back([kt, k0](double s) { return kt(s) - k0(s); });
  const NoiseFunctionals nf(kernels, mc.modulus_t, {0.0, mc.modulus_t});

  const RngStream root(mc.seed, 0x67616d6dULL);
  const std::size_t dim = m + 1;
  const SecondMoments acc = chunked_reduce(
      mc.n_paths, 256, mc.threads, [dim] { return SecondMoments(dim); },
      [&](SecondMoments& s, std::size_t path) {
        RngStream rng = root.substream(path);
        std::vector<double> x(dim);
        nf.sample(rng, x);
        s.add(x);
      });
  const Eigen::MatrixXd c = acc.covariance(), se = acc.std_errors();
  const Eigen::MatrixXd disc = nf.covariance();

  ExperimentReport rep;
  rep.name = "gamma_monte_carlo";
  rep.seed = mc.seed;
  rep.config = {{"hurst", cfg.ctx.H}, {"r", cfg.r}, {"n_paths", mc.n_paths}, {"d_max", mc.d_max},
                {"modulus_t", mc.modulus_t}, {"n_cells", nf.n_cells()}};
  double worst = 0.0;
  std::vector<double> zs;
  for (std::size_t d = 0; d < m; ++d) {
    const double exact = gamma_cov(cfg, 0, d);
    const double z = std::abs(c(0, d) - exact) / se(0, d);
    zs.push_back(z);
    worst = std::max(worst, z);
    rep.add_estimate("cov_0_" + std::to_string(d), c(0, d), c(0, d) - 4.0 * se(0, d), c(0, d) + 4.0 * se(0, d),
                     acc.count());
    rep.add_estimate("quadrature_cov_0_" + std::to_string(d), exact, exact, exact, 0);
    rep.add_estimate("discretised_cov_0_" + std::to_string(d), disc(0, d), disc(0, d), disc(0, d), 0);
  }
  rep.add_trend("cov_z", zs);
  rep.add_check("gamma_cov_matches_monte_carlo", worst, 4.0, "max over lags of |MC - quadrature| / SE");
  const double mod = gammahat_modulus(cfg, mc.modulus_t);
  const double zm = std::abs(c(m, m) - mod) / se(m, m);
  rep.add_estimate("modulus", c(m, m), c(m, m) - 4.0 * se(m, m), c(m, m) + 4.0 * se(m, m), acc.count());
  rep.add_estimate("quadrature_modulus", mod, mod, mod, 0);
  rep.add_check("modulus_matches_monte_carlo", zm, 4.0, "|MC - quadrature| / SE at t = modulus_t");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

namespace {

struct CountAcc {
  std::uint64_t n = 0, hits = 0;
  void merge(const CountAcc& o) {
    n += o.n;
    hits += o.hits;
  }
};

}  // namespace

ExperimentReport reg_gamhat_monte_carlo(const GammaConfig& cfg, double T, const SupMonteCarloConfig& mc) {
  cfg.validate();
  if (!(T > 0.0) || mc.n_grid < 2) throw DomainError("reg_gamhat_monte_carlo: need T > 0 and n_grid >= 2");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = mc.n_grid + 1;
  std::vector<double> acov(m);
  for (std::size_t k = 0; k < m; ++k) acov[k] = gammahat_autocov(cfg, T * static_cast<double>(k) / static_cast<double>(mc.n_grid));
  Eigen::MatrixXd S(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) S(a, b) = acov[a > b ? a - b : b - a];
  const CovMatrix cov(std::move(S));

  const RngStream root(mc.seed, 0x73757067ULL);
  const CountAcc acc = chunked_reduce(
      mc.n_paths, 256, mc.threads, [] { return CountAcc{}; },
      [&](CountAcc& s, std::size_t path) {
        RngStream rng = root.substream(path);
        std::vector<double> x(m);
        cov.sample(rng, x);
        double sup = 0.0;
        for (std::size_t k = 1; k < m; ++k) sup = std::max(sup, std::abs(x[k] - x[0]));
        ++s.n;
        if (sup >= 1.0) ++s.hits;
      });
  const RegGamhatConstants k = reg_gamhat_constants(cfg);
  const double bound = reg_gamhat_bound(k, cfg.r, 0, T);
  const double n = static_cast<double>(acc.n);
  const double p = static_cast<double>(acc.hits) / n;
  const double se = std::max(std::sqrt(p * (1.0 - p) / n), 1.0 / n);
  const Interval ci = wilson_interval(acc.hits, acc.n);

  ExperimentReport rep;
  rep.name = "reg_gamhat_monte_carlo";
  rep.seed = mc.seed;
  rep.config = {{"hurst", cfg.ctx.H}, {"r", cfg.r}, {"T", T}, {"n_paths", mc.n_paths}, {"n_grid", mc.n_grid}};
  rep.add_estimate("sup_exceed_probability", p, ci.low, ci.high, acc.n);
  rep.add_estimate("bound", bound, bound, bound, 0);
  rep.add_estimate("c_e", k.c_e, k.c_e, k.c_e, 0);
  rep.add_estimate("c_a", k.c_a, k.c_a, k.c_a, 0);
  rep.add_estimate("c_b", k.c_b, k.c_b, k.c_b, 0);
  rep.add_check("bound_not_violated", (p - bound) / se, 3.0, "(empirical - bound) / SE");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

}  // namespace fracdrift
