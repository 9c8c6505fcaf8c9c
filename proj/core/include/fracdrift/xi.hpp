#pragma once

#include <cmath>

namespace fracdrift {

// (a + b)^r - a^r for a > 0, b > 0. Throws DomainError otherwise.
double xi(double r, double a, double b);

namespace detail {

// (a + b)^r - a^r for a > 0, a + b > 0 (b may be negative). No validation.
inline double xi_signed(double r, double a, double b) {
  if (r == 0.0 || b == 0.0) return 0.0;
  return std::pow(a, r) * std::expm1(r * std::log1p(b / a));
}

}  // namespace detail
}  // namespace fracdrift
