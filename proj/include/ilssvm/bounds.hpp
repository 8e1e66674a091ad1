#pragma once

#include <optional>

namespace ilssvm {

// Analytic constants of the equilibrium error bound. None of them can be
// estimated from data; they are supplied by the user.
struct BoundInputs {
  double m = 100.0;             // sample count
  double delta = 0.05;          // confidence is 1 - delta
  double M = 1.0;               // a.s. bound on |f - y|
  double M_P = 0.0;             // a.s. bound on |f - P - mean error|
  double tau = 1.0;             // trade-off weight
  double D = 1.0;               // operator norm D_{nu rho}
  double sigma_rho_sq = 0.0;    // sigma_rho^2
  double C_E = 1.0;             // covering constant
  double ell_E = 1.0;           // covering exponent, > 1/2
  double J_norm = 1.0;          // |J_E|, folded into c2
  std::optional<double> c2;     // overrides (8 C_E / |J_E|)^(1 / ell_E)

  void validate() const;
};

struct ThetaCoefficients {
  double c0, c1, c2, d;
};

// c0 = m/32, c1 = ln(1/delta), c2 = (8 C_E / |J_E|)^(1/ell_E), d = 1/ell_E.
ThetaCoefficients theta_coefficients(const BoundInputs& in);

// Unique positive root of g(t) = c0 t + c1 - c2 t^(-d). g increases strictly
// from -inf to +inf on t > 0; the root is bracketed and bisected to full
// double precision.
double solve_theta_star(double c0, double c1, double c2, double d);

// (3M + 2M_P)^2 (1 + M_P^2 / M^2) theta*.
double sample_error_bound(const BoundInputs& in);

// D^2 M^2 + tau D^2 M_P^2 + sample error bound + sigma_rho^2.
double total_equilibrium_bound(const BoundInputs& in);

struct BoundRow {
  double m, delta, theta_star, sample_error, total;
};

BoundRow evaluate_bound(const BoundInputs& in);

}  // namespace ilssvm
