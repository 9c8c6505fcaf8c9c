#include "fracdrift/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "fracdrift/errors.hpp"

namespace fracdrift {

void QuadratureSpec::validate() const {
  if (!(u_max > 0.0) || !std::isfinite(u_max)) throw DomainError("quadrature: u_max must be positive");
  if (graded_levels < 1 || graded_levels > 200) throw DomainError("quadrature: graded_levels out of [1, 200]");
  if (!(graded_ratio > 0.0 && graded_ratio < 1.0)) throw DomainError("quadrature: graded_ratio must lie in (0, 1)");
  if (order < 2 || order > 64) throw DomainError("quadrature: order out of [2, 64]");
  if (!(tol > 0.0)) throw DomainError("quadrature: tol must be positive");
  if (!(truncation_tol > 0.0)) throw DomainError("quadrature: truncation_tol must be positive");
}

namespace quad {
namespace {

struct RuleStore {
  std::vector<double> x, w;
};

void build_rule(int n, RuleStore& out) {
  out.x.assign(n, 0.0);
  out.w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    out.x[i] = -z;
    out.x[n - 1 - i] = z;
    out.w[i] = w;
    out.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) out.x[n / 2] = 0.0;
}

std::array<RuleStore, 65> g_rules;
std::array<std::once_flag, 65> g_once;

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1 || n > 64) throw DomainError("gauss_legendre: order out of [1, 64]");
  std::call_once(g_once[n], [n] {
    if (n == 1) {
      g_rules[1].x = {0.0};
      g_rules[1].w = {2.0};
    } else {
      build_rule(n, g_rules[n]);
    }
  });
  return {g_rules[n].x, g_rules[n].w};
}

QuadResult geometric_tail(double prev2, double prev, double last) {
  if (last == 0.0) return {0.0, 0.0};
  if (prev == 0.0) return {0.0, std::abs(last)};
  const double q = last / prev;
  if (!(q > 0.0 && q < 1.0)) return {0.0, std::abs(last)};
  const double rem = last * q / (1.0 - q);
  double err = 0.5 * std::abs(rem);
  if (prev2 != 0.0) {
    const double q2 = prev / prev2;
    if (q2 > 0.0 && q2 < 1.0) err = std::abs(rem - last * q2 / (1.0 - q2));
  }
  return {rem, err};
}

QuadResult checked(QuadResult r, const QuadratureSpec& spec, const char* what) {
  if (!std::isfinite(r.value)) throw AccuracyError(std::string(what) + ": non-finite quadrature result", r.error);
  // Tail extrapolation error estimates are pessimistic, so failure is declared at 100x.
  const double budget = 100.0 * spec.tol * std::max(std::abs(r.value), 1e-300);
  if (r.error > budget)
    throw AccuracyError(std::string(what) + ": quadrature error estimate above tolerance", r.error);
  return r;
}

}  // namespace quad
}  // namespace fracdrift
