#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "fracdrift/errors.hpp"
#include "fracdrift/experiments.hpp"
#include "fracdrift/parallel.hpp"
#include "fracdrift/stats.hpp"

namespace fracdrift {

double log_plus(std::size_t i) { return i <= 1 ? 0.0 : std::log(static_cast<double>(i)); }

double lambda_r(const HurstContext& ctx, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("lambda_r: r must lie in (0, 1)");
  const double H = ctx.H;
  const double a = std::pow(1.0 - r, H);
  // 1 - (1-r)^{2H} without cancellation at small r.
  const double b = -std::expm1(2.0 * H * std::log1p(-r));
  return (a - std::sqrt(b)) / std::sqrt(H);
}

std::size_t LilConfig::i_max() const {
  return i_max_ladder.empty() ? 0 : *std::max_element(i_max_ladder.begin(), i_max_ladder.end());
}

void LilConfig::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("lil: r must lie in (0, 1)");
  if (i_max_ladder.empty()) throw DomainError("lil: i_max ladder is empty");
  if (!std::is_sorted(i_max_ladder.begin(), i_max_ladder.end()) ||
      std::adjacent_find(i_max_ladder.begin(), i_max_ladder.end()) != i_max_ladder.end())
    throw DomainError("lil: i_max ladder must be strictly increasing");
  if (i_max_ladder.front() < 2) throw DomainError("lil: every i_max must be at least 2");
  if (static_cast<double>(i_max()) * std::log(r) < std::log(std::numeric_limits<double>::min()))
    throw DomainError("lil: r^i_max underflows; lower i_max or raise r");
  if (n_paths < 2) throw DomainError("lil: need at least 2 paths");
  if (thick_set.size() != 0 && thick_set.size() <= i_max())
    throw DomainError("lil: thick set prefix must cover [0, i_max]");
  if (!(band_below >= 0.0 && band_above >= 0.0)) throw DomainError("lil: band offsets must be nonnegative");
  quad.validate();
}

namespace {

// int_a^1 (1 - u)^eta (1 - rho u)^eta du for 0 <= a < 1, 0 < rho <= 1.
double h_integral(double eta, double a, double rho, const QuadratureSpec& spec) {
  auto f = [eta, rho](double u) { return std::pow(1.0 - u, eta) * std::pow(1.0 - rho * u, eta); };
  return quad::checked(quad::graded(f, a, 1.0, Endpoint::right, spec), spec, "lil covariance").value;
}

}  // namespace

LevyScaleSampler::LevyScaleSampler(const HurstContext& ctx, double r, std::size_t i_max, const QuadratureSpec& spec)
    : m_(i_max + 1) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("LevyScaleSampler: r must lie in (0, 1)");
  const double eta = ctx.eta;
  const std::size_t m = m_;
  // Cov(X_i, X_j) = r^{d/2} h(0, r^d) and Cov(Xt_i, X_j) = r^{d/2} h(r, r^d) for j <= i, d = |i - j|.
  std::vector<double> full(m), tilde(m);
  for (std::size_t d = 0; d < m; ++d) {
    const double rd = std::pow(r, static_cast<double>(d));
    full[d] = std::sqrt(rd) * h_integral(eta, 0.0, rd, spec);
    tilde[d] = std::sqrt(rd) * h_integral(eta, r, rd, spec);
  }
  tilde_var_ = tilde[0];
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    S(i, i) = tilde[0];
    for (std::size_t j = 0; j < m; ++j) {
      S(m + i, m + j) = full[i > j ? i - j : j - i];
      if (j <= i) {
        S(i, m + j) = tilde[i - j];
        S(m + j, i) = tilde[i - j];
      }
    }
  }
  cov_ = std::make_unique<CovMatrix>(std::move(S));
}

void LevyScaleSampler::sample(RngStream& rng, Sample& out) const {
  std::vector<double> z(2 * m_);
  cov_->sample(rng, z);
  out.x_tilde.assign(z.begin(), z.begin() + static_cast<long>(m_));
  out.x.assign(z.begin() + static_cast<long>(m_), z.end());
  out.x_prime.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) out.x_prime[i] = out.x[i] - out.x_tilde[i];
}

namespace {

struct LilAcc {
  std::vector<std::vector<double>> minima;  // per ladder entry, in path order
  SecondMoments split;                      // (Xt_0..Xt_imax, Xp_0..Xp_imax)

  LilAcc(std::size_t ladder, std::size_t dim) : minima(ladder), split(dim) {}
  void merge(const LilAcc& o) {
    for (std::size_t k = 0; k < minima.size(); ++k)
      minima[k].insert(minima[k].end(), o.minima[k].begin(), o.minima[k].end());
    split.merge(o.split);
  }
};

}  // namespace

ExperimentReport lil_statistic(const LilConfig& cfg_in) {
  LilConfig cfg = cfg_in;
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t i_max = cfg.i_max();
  if (cfg.thick_set.size() == 0) cfg.thick_set = ThickSet::from_generator("naturals", i_max + 1);
  std::vector<std::size_t> idx;
  for (std::size_t i = 2; i <= i_max; ++i)
    if (cfg.thick_set.contains(i)) idx.push_back(i);
  if (idx.empty() || idx.front() > cfg.i_max_ladder.front())
    throw DomainError("lil: the index set has no element in [2, smallest i_max]");

  const LevyScaleSampler sampler(cfg.ctx, cfg.r, i_max, cfg.quad);
  const std::size_t m = sampler.size();
  const std::size_t L = cfg.i_max_ladder.size();
  const RngStream root(cfg.seed, 0x6c696cULL);

  const LilAcc acc = chunked_reduce(
      cfg.n_paths, 256, cfg.threads, [L, m] { return LilAcc(L, 2 * m); },
      [&](LilAcc& a, std::size_t path) {
        RngStream rng = root.substream(path);
        LevyScaleSampler::Sample s;
        sampler.sample(rng, s);
        double run = std::numeric_limits<double>::infinity();
        std::size_t pos = 0;
        for (std::size_t level = 0; level < L; ++level) {
          const std::size_t top = cfg.i_max_ladder[level];
          for (; pos < idx.size() && idx[pos] <= top; ++pos)
            run = std::min(run, s.x[idx[pos]] / std::sqrt(std::log(static_cast<double>(idx[pos]))));
          a.minima[level].push_back(run);
        }
        std::vector<double> v(2 * m);
        std::copy(s.x_tilde.begin(), s.x_tilde.end(), v.begin());
        std::copy(s.x_prime.begin(), s.x_prime.end(), v.begin() + static_cast<long>(m));
        a.split.add(v);
      });

  const double target = -1.0 / std::sqrt(cfg.ctx.H);
  const double lo = target - cfg.band_below, hi = target + cfg.band_above;

  ExperimentReport rep;
  rep.name = "lil_statistic";
  rep.seed = cfg.seed;
  rep.config = {{"hurst", cfg.ctx.H},
                {"r", cfg.r},
                {"i_max_ladder", cfg.i_max_ladder},
                {"thick_set", cfg.thick_set.description()},
                {"n_paths", cfg.n_paths},
                {"band", {lo, hi}}};
  rep.add_estimate("target", target, target, target, 0);
  const double lam = lambda_r(cfg.ctx, cfg.r);
  rep.add_estimate("lambda_r", lam, lam, lam, 0);

  std::vector<double> medians;
  for (std::size_t level = 0; level < L; ++level) {
    const auto& mins = acc.minima[level];
    const double med = median(mins);
    const Interval ci = median_interval(mins);
    medians.push_back(med);
    rep.add_estimate("median_M_imax_" + std::to_string(cfg.i_max_ladder[level]), med, ci.low, ci.high, mins.size());
    rep.add_trend("quantiles_M_imax_" + std::to_string(cfg.i_max_ladder[level]),
                  {quantile(mins, 0.1), quantile(mins, 0.25), med, quantile(mins, 0.75), quantile(mins, 0.9)});
  }
  rep.add_trend("median_M", medians);
  {
    const auto& mins = acc.minima.back();
    const auto below = static_cast<std::uint64_t>(std::count_if(mins.begin(), mins.end(), [lo](double x) { return x < lo; }));
    const Interval ci = wilson_interval(below, mins.size());
    rep.add_estimate("fraction_below_band", static_cast<double>(below) / static_cast<double>(mins.size()), ci.low,
                     ci.high, mins.size());
  }

  const double last = medians.back();
  rep.add_check("median_in_band", std::max(lo - last, last - hi), 0.0,
                "distance of the median at the largest i_max outside the band (<= 0 inside)");
  double up_steps = 0.0;
  for (std::size_t k = 1; k < L; ++k) up_steps += medians[k] >= medians[k - 1] ? 1.0 : 0.0;
  rep.add_check("median_moves_down", up_steps, 0.0, "number of ladder steps where the median does not decrease");

  // Xt_i are i.i.d. N(0, (1-r)^{2H}/(2H)) and independent of Xp_j for j >= i.
  const Eigen::MatrixXd c = acc.split.covariance(), se = acc.split.std_errors();
  const double tv = std::pow(1.0 - cfg.r, 2.0 * cfg.ctx.H) / (2.0 * cfg.ctx.H);
  double zvar = 0.0, zind = 0.0;
  std::size_t tests_ind = 0;
  std::vector<double> var_t;
  for (std::size_t i = 0; i < m; ++i) {
    zvar = std::max(zvar, std::abs(c(i, i) - tv) / se(i, i));
    var_t.push_back(c(i, i));
    for (std::size_t j = i + 1; j < m; ++j, ++tests_ind) zind = std::max(zind, std::abs(c(i, j)) / se(i, j));
    for (std::size_t j = i; j < m; ++j, ++tests_ind) zind = std::max(zind, std::abs(c(i, m + j)) / se(i, m + j));
  }
  rep.add_trend("tilde_variance", var_t);
  rep.add_estimate("tilde_variance_closed_form", tv, tv, tv, 0);
  rep.add_check("tilde_variance_matches", zvar, bonferroni_threshold(m, cfg.familywise_alpha),
                "max over i of |Var(Xt_i) - (1-r)^{2H}/(2H)| / SE");
  rep.add_check("tilde_independent", zind, bonferroni_threshold(tests_ind, cfg.familywise_alpha),
                "max |Cov(Xt_i, Xt_j)|, |Cov(Xt_i, Xp_j)| over i < j resp. j >= i, in SE");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.stamp_now();
  return rep;
}

}  // namespace fracdrift
