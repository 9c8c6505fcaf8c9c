#pragma once

#include <cmath>

#include "fracdrift/quadrature.hpp"

namespace fracdrift {

// Integrals of a kernel against the two hat functions of one grid cell [a, b]:
// left = int f(s) (b - s)/(b - a) ds, right = int f(s) (s - a)/(b - a) ds.
struct CellMoments {
  double left = 0.0;
  double right = 0.0;
  double error = 0.0;
};

// Gauss-Legendre order for a cell whose nearest kernel singularity lies `dist` cell
// widths away from the cell (dist >= 1).
inline int cell_order(double dist) {
  if (dist < 2.0) return 16;
  if (dist < 8.0) return 10;
  if (dist < 32.0) return 6;
  return 4;
}

// When f is singular at an endpoint (`sing`), only the moment of the opposite hat is
// formed (the singular endpoint's hat moment is reported as 0): callers pair the kernel
// with X_s - X_sing, which vanishes there.
template <class F>
CellMoments cell_moments(F&& f, double a, double b, Endpoint sing, double dist, const QuadratureSpec& spec) {
  const double h = b - a;
  if (sing == Endpoint::left) {
    auto g = [&](double s) { return f(s) * ((s - a) / h); };
    const QuadResult r = quad::graded(g, a, b, Endpoint::left, spec);
    return {0.0, r.value, r.error};
  }
  if (sing == Endpoint::right) {
    auto g = [&](double s) { return f(s) * ((b - s) / h); };
    const QuadResult r = quad::graded(g, a, b, Endpoint::right, spec);
    return {r.value, 0.0, r.error};
  }
  const quad::Rule rule = quad::gauss_legendre(cell_order(dist));
  double l = 0.0, r = 0.0;
  for (std::size_t k = 0; k < rule.x.size(); ++k) {
    const double x = rule.x[k];
    const double fv = rule.w[k] * f(0.5 * (a + b) + 0.5 * h * x);
    l += fv * (0.5 - 0.5 * x);
    r += fv * (0.5 + 0.5 * x);
  }
  return {0.5 * h * l, 0.5 * h * r, 0.0};
}

}  // namespace fracdrift
