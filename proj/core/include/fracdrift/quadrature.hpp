#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace fracdrift {

struct QuadratureSpec {
  double u_max = 1e3;            // truncation horizon of pasts on (-inf, 0]
  int graded_levels = 40;        // geometric refinement levels toward a singular endpoint
  double graded_ratio = 0.5;     // panel shrink factor per level
  int order = 16;                // Gauss-Legendre nodes per panel
  double tol = 1e-9;             // relative node-error budget for deterministic integrals
  double truncation_tol = 0.25;  // relative truncation budget for path functionals

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

enum class Endpoint { none, left, right };

namespace quad {

struct Rule {
  std::span<const double> x;  // nodes on [-1, 1]
  std::span<const double> w;
};

// Gauss-Legendre rule with n nodes, 1 <= n <= 64. Cached, thread-safe.
Rule gauss_legendre(int n);

template <class F>
double panel(F&& f, double a, double b, int order) {
  const Rule r = gauss_legendre(order);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * f(c + h * r.x[k]);
  return s * h;
}

// Remainder of a geometric panel sequence ... I_{n-2}, I_{n-1} continued to infinity.
// Returns {remainder, error}. Falls back to zero remainder with error |I_{n-1}| when the
// last ratios are not geometric.
QuadResult geometric_tail(double prev2, double prev, double last);

// Integral over [a, b] with panels refined geometrically toward `sing`.
// Extra levels can be requested when the integrand has structure far below (b-a).
template <class F>
QuadResult graded(F&& f, double a, double b, Endpoint sing, const QuadratureSpec& spec,
                  int extra_levels = 0) {
  if (!(b > a)) return {};
  if (sing == Endpoint::none) {
    const double coarse = panel(f, a, b, spec.order);
    const double m = 0.5 * (a + b);
    const double fine = panel(f, a, m, spec.order) + panel(f, m, b, spec.order);
    return {fine, std::abs(fine - coarse)};
  }
  // At least graded_levels + extra_levels panels; more (up to 4x) while the extrapolated
  // remainder is not yet within budget, which happens for mixed-power singularities.
  const int levels = spec.graded_levels + extra_levels;
  const int max_levels = 4 * levels;
  const double L = b - a, q = spec.graded_ratio;
  double total = 0.0, outer = L;
  double i2 = 0.0, i1 = 0.0, i0 = 0.0;
  QuadResult tail;
  const double floor = 1e-14 * std::max(std::abs(a), std::abs(b));
  for (int k = 0; k < max_levels; ++k) {
    if (outer <= floor) break;
    const double inner = outer * q;
    const double v = sing == Endpoint::left ? panel(f, a + inner, a + outer, spec.order)
                                            : panel(f, b - outer, b - inner, spec.order);
    total += v;
    i2 = i1;
    i1 = i0;
    i0 = v;
    outer = inner;
    if (k + 1 >= levels) {
      tail = geometric_tail(i2, i1, i0);
      if (tail.error <= 1e-2 * spec.tol * std::abs(total + tail.value)) break;
    }
  }
  return {total + tail.value, tail.error + 1e-15 * std::abs(total)};
}

// Integral over [a, inf) with panels [a + s 2^k, a + s 2^(k+1)] and extrapolated tail.
// The first panel [a, a + s] is graded toward a when `singular_at_a`.
template <class F>
QuadResult half_line(F&& f, double a, double s, bool singular_at_a, const QuadratureSpec& spec) {
  QuadResult res = graded(f, a, a + s, singular_at_a ? Endpoint::left : Endpoint::none, spec);
  double i2 = 0.0, i1 = 0.0, i0 = 0.0, lo = s;
  double q_prev = 2.0;
  for (int k = 0; k < 160; ++k) {
    const double v = panel(f, a + lo, a + 2.0 * lo, spec.order);
    res.value += v;
    i2 = i1;
    i1 = i0;
    i0 = v;
    lo *= 2.0;
    if (k >= 3 && i1 != 0.0) {
      const double q = i0 / i1;
      const bool stable = q > 0.0 && q < 1.0 && std::abs(q - q_prev) < 1e-3 * (1.0 - q);
      const double rem = stable ? std::abs(i0 * q / (1.0 - q)) : std::abs(i0);
      if (stable && rem < spec.tol * std::abs(res.value)) break;
      if (i0 == 0.0 && i1 == 0.0) break;
      q_prev = q;
    }
  }
  res += geometric_tail(i2, i1, i0);
  return res;
}

// Returns r unchanged, or throws AccuracyError when its error estimate is far above
// spec.tol relative to the value.
QuadResult checked(QuadResult r, const QuadratureSpec& spec, const char* what);

}  // namespace quad
}  // namespace fracdrift
