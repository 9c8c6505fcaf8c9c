#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fracdrift/errors.hpp"
#include "fracdrift/experiments.hpp"
#include "fracdrift/matrix_lemma.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/stats.hpp"

namespace fracdrift {

std::size_t ArbitrageConfig::n_max() const {
  return n_ladder.empty() ? 0 : *std::max_element(n_ladder.begin(), n_ladder.end());
}

GammaConfig ArbitrageConfig::gamma() const {
  GammaConfig g;
  g.ctx = ctx;
  g.r = r;
  g.n = std::max<std::size_t>(n_max(), 1);
  g.quad = quad;
  return g;
}

void ArbitrageConfig::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("arbitrage: r must lie in (0, 1)");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("arbitrage: alpha must lie in [0, 1)");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("arbitrage: p must lie in (0, 1); p n > n is impossible");
  if (n_ladder.empty()) throw DomainError("arbitrage: n ladder is empty");
  if (!std::is_sorted(n_ladder.begin(), n_ladder.end()) ||
      std::adjacent_find(n_ladder.begin(), n_ladder.end()) != n_ladder.end() || n_ladder.front() < 1)
    throw DomainError("arbitrage: n ladder must be strictly increasing and start at >= 1");
  if (n_max() > 64) throw DomainError("arbitrage: n must be at most 64");
  if (n_paths < 2) throw DomainError("arbitrage: need at least 2 paths");
  if (alpha_prime && !(*alpha_prime > 0.0 && *alpha_prime < alpha))
    throw DomainError("arbitrage: need 0 < alpha' < alpha");
  if (p_prime && !(*p_prime > 0.0 && *p_prime < p)) throw DomainError("arbitrage: need 0 < p' < p");
  if (r_tilde && !(*r_tilde > 0.0 && *r_tilde < r)) throw DomainError("arbitrage: need 0 < r_tilde < r");
  quad.validate();
}

Eigen::MatrixXd gamma_covariance_matrix(const GammaConfig& cfg, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t d = 0; d < n; ++d) c[d] = gamma_cov(cfg, 0, d);
  Eigen::MatrixXd S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) S(i, j) = c[i > j ? i - j : j - i];
  return S;
}

namespace {

std::vector<double> event_thresholds(const HurstContext& ctx, double alpha, std::size_t n) {
  std::vector<double> tau(n);
  for (std::size_t i = 0; i < n; ++i) tau[i] = alpha / std::sqrt(ctx.H) * std::sqrt(log_plus(i));
  return tau;
}

// Required number of exceedances among the first n: the smallest integer >= p n.
std::size_t required_hits(double p, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-12));
}

// Flags A_n for every ladder entry from one Gamma vector.
void ladder_events(const std::vector<double>& x, const std::vector<double>& tau, const std::vector<std::size_t>& ns,
                   const std::vector<std::size_t>& need, std::vector<char>& out) {
  std::size_t count = 0, pos = 0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    for (; pos < ns[k] && pos < x.size(); ++pos) count += x[pos] >= tau[pos];
    out[k] = count >= need[k];
  }
}

struct HitAcc {
  std::vector<std::uint64_t> hits;
  std::uint64_t n = 0;
  explicit HitAcc(std::size_t k = 0) : hits(k, 0) {}
  void merge(const HitAcc& o) {
    for (std::size_t k = 0; k < hits.size(); ++k) hits[k] += o.hits[k];
    n += o.n;
  }
};

struct PairAcc {
  std::vector<Moments> m;
  explicit PairAcc(std::size_t k = 0) : m(k) {}
  void merge(const PairAcc& o) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k].merge(o.m[k]);
  }
};

double neg_inf() { return -std::numeric_limits<double>::infinity(); }

}  // namespace

ExperimentReport a_n_probability(const ArbitrageConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const GammaConfig g = cfg.gamma();
  const std::size_t dim = cfg.n_max();
  const Eigen::MatrixXd S = gamma_covariance_matrix(g, dim);
  const CovMatrix cov(S);
  const std::vector<double> tau = event_thresholds(cfg.ctx, cfg.alpha, dim);
  const std::vector<std::size_t>& ns = cfg.n_ladder;
  std::vector<std::size_t> need;
  for (std::size_t n : ns) need.push_back(required_hits(cfg.p, n));
  const std::size_t L = ns.size();

  const RngStream root(cfg.seed, 0x616e70ULL);
  const HitAcc acc = chunked_reduce(
      cfg.n_paths, 4096, cfg.threads, [L] { return HitAcc(L); },
      [&](HitAcc& a, std::size_t path) {
        RngStream rng = root.substream(path);
        std::vector<double> x(dim);
        cov.sample(rng, x);
        std::vector<char> ev(L);
        ladder_events(x, tau, ns, need, ev);
        for (std::size_t k = 0; k < L; ++k) a.hits[k] += ev[k];
        ++a.n;
      });

  // Second estimator: symmetric square root of the covariance, antithetic pairs (g, -g),
  // its own stream, only for the small n of the ladder.
  std::vector<std::size_t> dual_ns;
  for (std::size_t n : ns)
    if (n <= cfg.dual_max_n) dual_ns.push_back(n);
  PairAcc dual(dual_ns.size());
  if (!dual_ns.empty()) {
    const std::size_t dd = dual_ns.back();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.topLeftCorner(dd, dd));
    const Eigen::MatrixXd root_s =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    std::vector<std::size_t> dneed;
    for (std::size_t n : dual_ns) dneed.push_back(required_hits(cfg.p, n));
    const RngStream droot(cfg.seed, 0x616e7064ULL);
    const std::size_t D = dual_ns.size();
    dual = chunked_reduce(
        cfg.n_paths / 2, 4096, cfg.threads, [D] { return PairAcc(D); },
        [&](PairAcc& a, std::size_t pair) {
          RngStream rng = droot.substream(pair);
          Eigen::VectorXd z(static_cast<Eigen::Index>(dd));
          for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
          const Eigen::VectorXd y = root_s * z;
          std::vector<double> xp(y.data(), y.data() + dd), xm(dd);
          for (std::size_t i = 0; i < dd; ++i) xm[i] = -xp[i];
          std::vector<char> ep(D), em(D);
          ladder_events(xp, tau, dual_ns, dneed, ep);
          ladder_events(xm, tau, dual_ns, dneed, em);
          for (std::size_t k = 0; k < D; ++k) a.m[k].add(0.5 * (ep[k] + em[k]));
        });
  }

  ExperimentReport rep;
  rep.name = "a_n_probability";
  rep.seed = cfg.seed;
  rep.config = {{"hurst", cfg.ctx.H}, {"r", cfg.r}, {"alpha", cfg.alpha}, {"p", cfg.p},
                {"n_ladder", ns},     {"n_paths", cfg.n_paths}, {"dual_max_n", cfg.dual_max_n},
                {"covariance_jitter", cov.jitter()}};
  rep.add_estimate("gamma_variance", S(0, 0), S(0, 0), S(0, 0), 0);

  const double N = static_cast<double>(acc.n);
  std::vector<double> prob, rate, rate_lo, rate_hi;
  for (std::size_t k = 0; k < L; ++k) {
    const std::size_t n = ns[k];
    const double ph = static_cast<double>(acc.hits[k]) / N;
    const Interval ci = wilson_interval(acc.hits[k], acc.n);
    rep.add_estimate("P_A_" + std::to_string(n), ph, ci.low, ci.high, acc.n);
    const double dn = static_cast<double>(n);
    const double lr = acc.hits[k] > 0 ? std::log(ph) / dn : std::numeric_limits<double>::quiet_NaN();
    const double llo = ci.low > 0.0 ? std::log(ci.low) / dn : neg_inf();
    const double lhi = std::log(ci.high) / dn;
    rep.add_estimate("log_P_over_n_" + std::to_string(n), lr, llo, lhi, acc.n);
    prob.push_back(ph);
    rate.push_back(lr);
    rate_lo.push_back(llo);
    rate_hi.push_back(lhi);
  }
  rep.add_trend("n", std::vector<double>(ns.begin(), ns.end()));
  rep.add_trend("P_A_n", prob);
  rep.add_trend("log_P_over_n", rate);

  // n = 1: A_1 = {Gamma_0 >= 0}, probability 1/2.
  if (ns.front() == 1) {
    const double z = std::abs(prob[0] - 0.5) / std::sqrt(0.25 / N);
    rep.add_check("n1_is_half", z, 4.0, "|P(A_1) - 1/2| / SE");
  }
  // Trend over the ladder entries with n >= 2 (n = 1 is the sanity value).
  std::vector<std::size_t> tr;
  for (std::size_t k = 0; k < L; ++k)
    if (ns[k] >= 2) tr.push_back(k);
  if (tr.size() >= 2) {
    double bad = 0.0;
    for (std::size_t a = 1; a < tr.size(); ++a) {
      const double prev = rate[tr[a - 1]], cur = rate[tr[a]];
      bad += !(cur < prev) ? 1.0 : 0.0;  // NaN (zero hits) counts against the trend
    }
    rep.add_check("log_rate_decreasing", bad, 0.0, "ladder steps where log P(A_n) / n does not decrease");
    rep.add_check("log_rate_ci_separated", rate_hi[tr.back()] - rate_lo[tr.front()], 0.0,
                  "upper CI at the largest n minus lower CI at the smallest n >= 2 (< 0 when disjoint)");
  }
  if (!dual_ns.empty()) {
    double worst = 0.0;
    for (std::size_t d = 0; d < dual_ns.size(); ++d) {
      const std::size_t k = static_cast<std::size_t>(std::find(ns.begin(), ns.end(), dual_ns[d]) - ns.begin());
      const Moments& m = dual.m[d];
      const double pd = m.mean(), sd = m.std_error();
      rep.add_estimate("dual_P_A_" + std::to_string(dual_ns[d]), pd, pd - 1.96 * sd, pd + 1.96 * sd, 2 * m.count());
      const double s1 = std::sqrt(std::max(prob[k] * (1.0 - prob[k]), 1.0 / N) / N);
      worst = std::max(worst, std::abs(prob[k] - pd) / std::hypot(s1, sd));
    }
    rep.add_check("dual_estimator_agreement", worst, bonferroni_threshold(dual_ns.size(), cfg.familywise_alpha),
                  "max over n of |Cholesky - antithetic| / combined SE");
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

std::uint64_t n_threshold(double H, double alpha, double alpha_prime, double p, double p_prime) {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("n_threshold: H must lie in (0, 1)");
  if (!(alpha_prime > 0.0 && alpha_prime < alpha && alpha < 1.0))
    throw DomainError("n_threshold: need 0 < alpha' < alpha < 1");
  if (!(p_prime > 0.0 && p_prime < p && p < 1.0)) throw DomainError("n_threshold: need 0 < p' < p < 1");
  const double da = alpha - alpha_prime;
  const double v = (std::exp(H / (da * da)) + 1.0) / (p - p_prime);
  if (!(v < 1.8e19)) throw DomainError("n_threshold: threshold does not fit in 64 bits");
  return static_cast<std::uint64_t>(std::ceil(v));
}

namespace {

// Largest eps (to 1e-6) at which phi_k is finite.
double phi_k_radius() {
  double lo = 1e-6, hi = 0.25;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::isfinite(phi_functions(mid).phi_k)) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace

ProductTailBound product_tail_bound(const ArbitrageConfig& cfg, std::size_t n, const std::vector<std::size_t>& I,
                                    std::optional<double> eps, std::optional<double> sigma2) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha < 1.0) || !(cfg.p > 0.0 && cfg.p < 1.0))
    throw DomainError("product_tail_bound: need alpha in [0, 1) and p in (0, 1)");
  if (n == 0) throw DomainError("product_tail_bound: n must be positive");
  std::vector<std::size_t> idx = I;
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw DomainError("product_tail_bound: I has repeats");
  if (!idx.empty() && idx.back() >= n) throw DomainError("product_tail_bound: I must lie in [0, n)");
  const std::size_t need = required_hits(cfg.p, n);
  if (idx.size() < need) throw DomainError("product_tail_bound: need |I| >= p n");

  ProductTailBound b;
  b.indices = idx;
  if (!eps || !sigma2) {
    GammaConfig g = cfg.gamma();
    g.n = n;
    const GammaCovariance gc = decay_bound_check(g, std::max<std::size_t>(n - 1, 1));
    b.eps = eps.value_or(gc.eps);
    b.sigma2 = sigma2.value_or(gc.sigma2);
  } else {
    b.eps = *eps;
    b.sigma2 = *sigma2;
  }
  if (!(b.eps > 0.0) || !(b.sigma2 > 0.0)) throw DomainError("product_tail_bound: eps and sigma^2 must be positive");
  const PhiFunctions phi = phi_functions(b.eps);
  if (!std::isfinite(phi.phi_j) || !std::isfinite(phi.phi_k)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "product_tail_bound: phi_k is infinite at eps = %.6g; the bound needs eps below about %.6f "
                  "(decrease r)",
                  b.eps, phi_k_radius());
    throw DomainError(buf);
  }
  b.phi_j = phi.phi_j;
  b.phi_k = phi.phi_k;
  b.c_l = cfg.alpha / std::sqrt(cfg.ctx.H) / (std::sqrt(phi.phi_k) * std::sqrt(b.sigma2));
  const double c2 = b.c_l * b.c_l;

  bool ok = true;
  const double tol = 1e-12;
  for (std::size_t i : idx) {
    const double lf = std::log(normal_tail(b.c_l * std::sqrt(log_plus(i))));
    const double lb = -0.5 * c2 * log_plus(i);
    b.log_factors.push_back(lf);
    b.log_factor_bounds.push_back(lb);
    b.log_product += lf;
    b.log_gaussian_bound += lb;
    ok = ok && lf <= lb + tol;
  }
  b.log_ordered_bound = idx.empty() ? 0.0 : -0.5 * c2 * std::lgamma(static_cast<double>(idx.size()));
  b.log_factorial_bound = need == 0 ? 0.0 : -0.5 * c2 * std::lgamma(static_cast<double>(need));
  ok = ok && b.log_product <= b.log_gaussian_bound + tol;
  ok = ok && b.log_gaussian_bound <= b.log_ordered_bound + tol * (1.0 + std::abs(b.log_ordered_bound));
  ok = ok && b.log_ordered_bound <= b.log_factorial_bound + tol * (1.0 + std::abs(b.log_factorial_bound));
  b.log_density_ratio = 0.5 * static_cast<double>(n) * std::log(phi.phi_j * phi.phi_k);
  b.log_bound = b.log_density_ratio + b.log_factorial_bound;
  b.chain_ok = ok;
  return b;
}

BigInt ceil_inverse_power(double r_tilde, std::size_t n) {
  if (!(r_tilde > 0.0 && r_tilde < 1.0)) throw DomainError("ceil_inverse_power: r_tilde must lie in (0, 1)");
  const double k = 1.0 / r_tilde;
  if (std::nearbyint(k) == k && r_tilde * k == 1.0) {
    BigInt out = 1;
    const BigInt base = static_cast<unsigned long long>(k);
    for (std::size_t i = 0; i < n; ++i) out *= base;
    return out;
  }
  const long double v = std::pow(static_cast<long double>(k), static_cast<long double>(n));
  if (!(v < 1e300L)) throw DomainError("ceil_inverse_power: r_tilde^{-n} too large");
  return BigInt(static_cast<double>(std::ceil(v)));
}

ExperimentReport union_bound_ledger(const ArbitrageConfig& cfg, const std::vector<std::size_t>& ns,
                                    const std::vector<double>& p_prime_values) {
  if (!cfg.r_tilde) throw DomainError("union_bound_ledger: r_tilde must be set");
  if (!(*cfg.r_tilde > 0.0 && *cfg.r_tilde < cfg.r)) throw DomainError("union_bound_ledger: need 0 < r_tilde < r");
  if (ns.size() != p_prime_values.size()) throw DomainError("union_bound_ledger: one P(A'_n) value per n");
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] == 0) throw DomainError("union_bound_ledger: n must be positive");
    if (!(p_prime_values[k] >= 0.0 && p_prime_values[k] <= 1.0))
      throw DomainError("union_bound_ledger: P(A'_n) values must lie in [0, 1]");
  }
  const auto start = std::chrono::steady_clock::now();
  const double rt = *cfg.r_tilde;
  const RegGamhatConstants k = reg_gamhat_constants(cfg.gamma());
  const double th = two_h_wedge_one(cfg.ctx);
  auto remainder_bound = [&](std::size_t n) {
    const double dn = static_cast<double>(n);
    return dn * k.c_b * std::exp(-k.c_a * std::pow(cfg.r / rt, th * dn));
  };

  ExperimentReport rep;
  rep.name = "union_bound_ledger";
  rep.seed = cfg.seed;
  rep.config = {{"hurst", cfg.ctx.H}, {"r", cfg.r}, {"r_tilde", rt}, {"n", ns}, {"p_prime_values", p_prime_values}};
  if (cfg.alpha_prime) rep.config["alpha_prime"] = *cfg.alpha_prime;
  if (cfg.p_prime) rep.config["p_prime"] = *cfg.p_prime;
  rep.add_estimate("c_a", k.c_a, k.c_a, k.c_a, 0);
  rep.add_estimate("c_b", k.c_b, k.c_b, k.c_b, 0);

  std::vector<double> ceil_inv, rsum, rbound, assembled;
  double worst = 0.0;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const std::size_t n = ns[j];
    const double Tn = std::pow(rt, static_cast<double>(n));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += reg_gamhat_bound(k, cfg.r, i, Tn);
    const double rb = remainder_bound(n);
    const double ci = static_cast<double>(ceil_inverse_power(rt, n));
    ceil_inv.push_back(ci);
    rsum.push_back(s);
    rbound.push_back(rb);
    assembled.push_back(ci * (p_prime_values[j] + rb));
    worst = std::max(worst, (s - rb) / std::max(rb, std::numeric_limits<double>::min()));
  }
  rep.add_trend("n", std::vector<double>(ns.begin(), ns.end()));
  rep.add_trend("ceil_inverse_T", ceil_inv);
  rep.add_trend("p_prime", p_prime_values);
  rep.add_trend("remainder_sum", rsum);
  rep.add_trend("remainder_bound", rbound);
  rep.add_trend("assembled_bound", assembled);

  // n c_b exp(-c_a q^n) with q > 1 rises then falls; the crossover is its first decrease.
  std::size_t cross = 0;
  for (std::size_t n = 1; n < 100000; ++n)
    if (remainder_bound(n + 1) < remainder_bound(n)) {
      cross = n;
      break;
    }
  rep.add_estimate("crossover_index", static_cast<double>(cross), static_cast<double>(cross),
                   static_cast<double>(cross), 0);
  if (cfg.alpha_prime && cfg.p_prime) {
    // log of (e^x + 1) / (p - p') stays finite when the threshold itself overflows.
    const double da = cfg.alpha - *cfg.alpha_prime, x = cfg.ctx.H / (da * da);
    const double lg = (x + std::log1p(std::exp(-x)) - std::log(cfg.p - *cfg.p_prime)) / std::log(10.0);
    rep.add_estimate("log10_n_threshold", lg, lg, lg, 0);
    if (lg < 19.0) {
      const double t = static_cast<double>(n_threshold(cfg.ctx.H, cfg.alpha, *cfg.alpha_prime, cfg.p, *cfg.p_prime));
      rep.add_estimate("n_threshold", t, t, t, 0);
    }
  }
  rep.add_check("remainder_sum_below_bound", worst, 1e-12, "max over n of (sum - n c_b exp(...)) / bound");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

}  // namespace fracdrift
