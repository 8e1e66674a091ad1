#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ilssvm/expr.hpp"
#include "ilssvm/types.hpp"

namespace ilssvm {

// P(x) = sum_j mu_j * C_j(x), basis terms evaluated on the raw attributes.
struct InterpModel {
  std::vector<expr::Expr> basis;
  Vector mu;

  // Throws InvalidArgument if the basis is empty, mu has the wrong length or
  // a term references an attribute beyond `dims`.
  void validate(std::size_t dims) const;
};

InterpModel make_interp(const std::vector<std::string>& basis_text, std::vector<double> mu);

// B(k, j) = C_j(x_k). EvalError messages name the offending row.
Eigen::MatrixXd basis_matrix(std::span<const expr::Expr> basis, const Matrix& X);

Vector interp_predict(const InterpModel& model, const Matrix& X);

// How the residual is centred before squaring. `signed_mean` makes the
// distance the population variance of f - p; `absolute_mean` subtracts the
// mean absolute residual instead.
enum class Centering { signed_mean, absolute_mean };

// (1/N) sum (f_k - p_k).
double mean_error(std::span<const double> f, std::span<const double> p);

// (1/N) sum (f_k - p_k - c)^2 with c the centring constant above.
double interpretation_distance(std::span<const double> f, std::span<const double> p,
                               Centering centering = Centering::signed_mean);

inline double interpretation_distance(const Vector& f, const Vector& p,
                                      Centering centering = Centering::signed_mean) {
  return interpretation_distance(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())),
                                 std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                                 centering);
}

struct PsoParams {
  int swarm_size = 30;
  int iterations = 200;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double low = -10.0;
  double high = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PsoResult {
  InterpModel model;
  double fitness = 0.0;
  // Global-best fitness after each iteration; iteration 0 is the initial swarm.
  std::vector<double> history;
};

// Global-best PSO over mu minimising interpretation_distance(target, B mu).
// Iteration 1 evaluates the initial swarm; each further iteration moves every
// particle once. Positions and velocities are clamped to the bounds.
PsoResult pso_fit_interp(const std::vector<expr::Expr>& basis, const Matrix& X, const Vector& target,
                         const PsoParams& params, Centering centering = Centering::signed_mean);

}  // namespace ilssvm
