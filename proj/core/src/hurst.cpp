#include "fracdrift/hurst.hpp"

#include <cmath>

#include "fracdrift/errors.hpp"
#include "fracdrift/xi.hpp"

namespace fracdrift {

double euler_pi(double x) {
  if (!std::isfinite(x) || (x <= -1.0 && x == std::floor(x)))
    throw DomainError("euler_pi: pole or non-finite argument");
  return std::tgamma(x + 1.0);
}

double xi(double r, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("xi: arguments a and b must be positive");
  return detail::xi_signed(r, a, b);
}

HurstContext make_context(double H, const QuadratureSpec& spec) {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("make_context: H must lie in (0, 1)");
  spec.validate();
  HurstContext ctx;
  ctx.H = H;
  ctx.eta = H - 0.5;
  ctx.cH = 1.0 / (euler_pi(ctx.eta) * euler_pi(-ctx.eta));
  if (ctx.eta == 0.0) return ctx;
  const double eta = ctx.eta;
  auto f = [eta](double s) {
    const double d = detail::xi_signed(eta, s, 1.0);
    return d * d;
  };
  QuadResult I = quad::graded(f, 0.0, 1.0, Endpoint::left, spec);
  I += quad::half_line(f, 1.0, 1.0, false, spec);
  quad::checked(I, spec, "make_context");
  ctx.c1 = 1.0 / std::sqrt(1.0 / (2.0 * H) + I.value);
  return ctx;
}

}  // namespace fracdrift
