#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "ilssvm/data.hpp"
#include "ilssvm/interp.hpp"
#include "ilssvm/kernel.hpp"

namespace ilssvm {

struct HyperParams {
  double phi = 1.0;    // weight on squared prediction slacks
  double sigma = 0.0;  // weight on squared interpretability slacks; 0 gives plain LSSVM

  void validate() const;
};

// Dense KKT system of the ILSSVM (or LSSVM when sigma == 0). Unknowns are
// ordered [alpha; beta; b] (beta omitted for LSSVM).
struct KktSystem {
  Eigen::MatrixXd A;
  Vector rhs;
};

// With H the centring matrix:
//   [ G + I/phi   G H           1 ] [alpha]   [ y  ]
//   [ H G         H G H + I/sig 0 ] [beta ] = [ H p]
//   [ 1^T         0             0 ] [b    ]   [ 0  ]
// The off-diagonal blocks are written from one set of entries so A is
// symmetric bit for bit. For sigma == 0 the reduced LSSVM system
// [G + I/phi, 1; 1^T, 0] is returned.
KktSystem assemble_kkt(const Eigen::MatrixXd& G, const Vector& p, const Vector& y, const HyperParams& hyper);

struct TrainedModel {
  KernelSpec kernel;
  Matrix X_train;
  Vector alpha;
  Vector beta;  // all zero when sigma == 0
  double b = 0.0;
  HyperParams hyper;
  std::optional<NormParams> norm;  // set when the model was trained on normalized data

  double kkt_residual = 0.0;        // |A sol - rhs|_inf / |rhs|_inf
  double condition_estimate = 0.0;  // 1-norm estimate for the SPD leading block
};

inline constexpr double kMaxCondition = 1e12;

// Solves the KKT system by Cholesky on the SPD leading block plus one
// elimination for the bias row; refines once if the relative residual
// exceeds 1e-10. Throws SolveError when the block is not positive definite
// or its condition estimate exceeds kMaxCondition.
TrainedModel train_ilssvm(const Matrix& X, const Vector& y, const Vector& interp_values, const KernelSpec& kernel,
                          const HyperParams& hyper);
TrainedModel train_ilssvm(const Matrix& X, const Vector& y, const InterpModel& interp, const KernelSpec& kernel,
                          const HyperParams& hyper);
TrainedModel train_lssvm(const Matrix& X, const Vector& y, const KernelSpec& kernel, double phi);

// f(x) = sum_i alpha_i K(x_i, x) + sum_i beta_i (K(x_i, x) - mean_j K(x_j, x)) + b,
// on the scale the model was trained on.
Vector predict(const TrainedModel& model, const Matrix& X_new);
Vector predict_serial(const TrainedModel& model, const Matrix& X_new);

// Normalizes raw inputs with model.norm and maps predictions back to the
// raw target scale. Same as predict() when the model has no norm.
Vector predict_raw(const TrainedModel& model, const Matrix& X_raw);

// 1/2 |w|^2 + phi/2 sum e_k^2 + sigma/2 sum tau_k^2 with
// w = sum_i (alpha + H beta)_i phi(x_i), e = y - f(X), tau = -H (f(X) - p).
double primal_objective(const TrainedModel& model, const Matrix& X, const Vector& y, const Vector& p);

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace ilssvm
