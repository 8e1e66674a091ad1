#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ilssvm/data.hpp"
#include "ilssvm/interp.hpp"
#include "ilssvm/kernel.hpp"
#include "ilssvm/metrics.hpp"
#include "ilssvm/svm.hpp"

namespace ilssvm {

struct FoldPlan {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold index of each sample
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Seeded shuffle, then round-robin: fold sizes differ by at most one.
FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

enum class Execution { serial, parallel };

struct CvOptions {
  bool normalize = true;          // min-max on the training split of every fold
  bool reference_metrics = true;  // R_MSE and R_SCC against y_clean
  bool record_time = true;        // false writes 0 for D_time
  Centering centering = Centering::signed_mean;
  Execution execution = Execution::parallel;
};

struct FoldResult {
  NormParams norm;  // training-split statistics used for this fold
  std::vector<std::size_t> test_rows;
  Vector predictions;  // on the fold's normalized scale
  double mse = 0.0;
  double ppcc = 0.0;   // NaN when undefined (constant predictions or targets)
  double r_id = 0.0;
  double r_mse = 0.0;
  double r_scc = 0.0;
  double seconds = 0.0;
};

struct EvalReport {
  std::vector<FoldResult> folds;
  MetricSummary mse, ppcc, r_id, r_mse, r_scc, d_time;
};

// `interp_values` are P(x) on the raw rows of ds, in raw target units; each
// fold maps them with its training-split target normalization.
EvalReport cross_validate(const Dataset& ds, const Vector& interp_values, const KernelSpec& kernel,
                          const HyperParams& hyper, const FoldPlan& plan, const CvOptions& options = {});
EvalReport cross_validate(const Dataset& ds, const InterpModel& interp, const KernelSpec& kernel,
                          const HyperParams& hyper, const FoldPlan& plan, const CvOptions& options = {});

struct SimplexParams {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_iters = 500;
  double tol = 1e-8;          // on the simplex diameter (max-norm from the best vertex)
  double initial_step = 0.5;  // offset of the initial vertices along each axis

  void validate() const;
};

struct SimplexResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // best vertex value at the start of each iteration
};

// Non-finite objective values are treated as +infinity.
SimplexResult nelder_mead(const std::function<double(const Vector&)>& objective, const Vector& x0,
                          const SimplexParams& params = {});

// Closed interval in log10 space. low == high pins the parameter.
struct LogBox {
  double low = 0.0;
  double high = 0.0;
};

struct SearchSpace {
  LogBox width{-2.0, 2.0};
  LogBox phi{-2.0, 4.0};
  LogBox sigma{-8.0, 3.0};  // log10(sigma + 1e-8)
  bool tune_sigma = true;   // false pins sigma to 0 (plain LSSVM)
  int grid_points = 3;      // per searched axis; 0 starts from the box centre
  bool grid_only = false;
  SimplexParams simplex{1.0, 2.0, 0.5, 0.5, 150, 1e-3, 0.5};

  void validate() const;
};

inline constexpr double kSigmaEpsilon = 1e-8;
double decode_sigma(double log_value);

struct TuneWeights {
  double mse = 1.0;
  double id = 0.0;
};

struct TuneResult {
  KernelSpec kernel;
  HyperParams hyper;
  double score = 0.0;
  int evaluations = 0;
};

// Minimises weights.mse * CV-mean MSE + weights.id * CV-mean R_ID over the
// log-scaled box: an optional grid picks the start, Nelder-Mead refines.
// Configurations whose training fails score +infinity.
TuneResult tune_hyperparams(const Dataset& ds, const Vector& interp_values, const KernelSpec& kernel,
                            const SearchSpace& space, const FoldPlan& plan, const TuneWeights& weights,
                            CvOptions options = {});

}  // namespace ilssvm
