#include "ilssvm/bounds.hpp"

#include <cmath>

#include "ilssvm/error.hpp"

namespace ilssvm {

void BoundInputs::validate() const {
  if (!(m >= 1.0) || !std::isfinite(m)) throw InvalidArgument("bounds: m must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("bounds: delta must lie in (0, 1)");
  if (!(M > 0.0)) throw InvalidArgument("bounds: M must be positive");
  if (!(M_P >= 0.0)) throw InvalidArgument("bounds: M_P must be non-negative");
  if (!(ell_E > 0.5)) throw InvalidArgument("bounds: ell_E must exceed 1/2");
  if (!(C_E > 0.0)) throw InvalidArgument("bounds: C_E must be positive");
  if (!(J_norm > 0.0)) throw InvalidArgument("bounds: |J_E| must be positive");
  if (!(tau >= 0.0)) throw InvalidArgument("bounds: tau must be non-negative");
  if (!(sigma_rho_sq >= 0.0)) throw InvalidArgument("bounds: sigma_rho_sq must be non-negative");
  if (c2 && !(*c2 > 0.0)) throw InvalidArgument("bounds: c2 must be positive");
}

ThetaCoefficients theta_coefficients(const BoundInputs& in) {
  in.validate();
  const double d = 1.0 / in.ell_E;
  const double c2 = in.c2 ? *in.c2 : std::pow(8.0 * in.C_E / in.J_norm, d);
  return {in.m / 32.0, std::log(1.0 / in.delta), c2, d};
}

double solve_theta_star(double c0, double c1, double c2, double d) {
  if (!(c0 > 0.0)) throw InvalidArgument("solve_theta_star: c0 must be positive");
  if (!(c2 > 0.0)) throw InvalidArgument("solve_theta_star: c2 must be positive");
  if (!(c1 >= 0.0)) throw InvalidArgument("solve_theta_star: c1 must be non-negative");
  if (!(d > 0.0)) throw InvalidArgument("solve_theta_star: d must be positive");

  const auto g = [&](double t) { return c0 * t + c1 - c2 * std::pow(t, -d); };
  double lo = 1.0, hi = 1.0;
  while (g(lo) > 0.0) lo *= 0.5;
  while (g(hi) < 0.0) hi *= 2.0;
  if (lo == hi) {
    if (g(lo) == 0.0) return lo;
    lo = hi * 0.5;
  }
  // g(lo) <= 0 <= g(hi)
  for (int i = 0; i < 4096; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double v = g(mid);
    if (v == 0.0) return mid;
    (v < 0.0 ? lo : hi) = mid;
  }
  return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

double sample_error_bound(const BoundInputs& in) {
  const auto c = theta_coefficients(in);
  const double theta = solve_theta_star(c.c0, c.c1, c.c2, c.d);
  const double lead = 3.0 * in.M + 2.0 * in.M_P;
  return lead * lead * (1.0 + (in.M_P * in.M_P) / (in.M * in.M)) * theta;
}

double total_equilibrium_bound(const BoundInputs& in) {
  const double d2 = in.D * in.D;
  return d2 * in.M * in.M + in.tau * d2 * in.M_P * in.M_P + sample_error_bound(in) + in.sigma_rho_sq;
}

BoundRow evaluate_bound(const BoundInputs& in) {
  const auto c = theta_coefficients(in);
  const double theta = solve_theta_star(c.c0, c.c1, c.c2, c.d);
  return {in.m, in.delta, theta, sample_error_bound(in), total_equilibrium_bound(in)};
}

}  // namespace ilssvm
