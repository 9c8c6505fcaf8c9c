#pragma once

#include "fracdrift/quadrature.hpp"

namespace fracdrift {

// Euler's pi function, pi(x) = Gamma(x + 1).
double euler_pi(double x);

struct HurstContext {
  double H = 0.5;
  double eta = 0.0;  // H - 1/2
  double c1 = 1.0;   // normalization of the moving-average kernel
  double cH = 1.0;   // 1 / (pi(eta) pi(-eta))
};

// c1^{-2} = 1/(2H) + int_0^inf ((1+s)^eta - s^eta)^2 ds, evaluated by graded quadrature.
HurstContext make_context(double H, const QuadratureSpec& spec = {});

// min(2H, 1), the Hoelder exponent of the Gamma-hat modulus.
inline double two_h_wedge_one(const HurstContext& ctx) { return ctx.H < 0.5 ? 2.0 * ctx.H : 1.0; }

}  // namespace fracdrift
