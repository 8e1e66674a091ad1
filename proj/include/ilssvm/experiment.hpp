#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ilssvm/config.hpp"
#include "ilssvm/data.hpp"
#include "ilssvm/interp.hpp"
#include "ilssvm/tuning.hpp"

namespace ilssvm {

// Generator terms used as the interpretation basis of each builtin dataset.
std::vector<std::string> default_basis(std::string_view builtin);

// Builtin or custom spec generated with the section seed, or a CSV file.
Dataset load_dataset(const DatasetSection& section);

struct InterpFit {
  InterpModel model;   // coefficients in raw target units
  double fitness = 0;  // interpretation distance on the [-1, 1] target scale
};

// PSO against the noise-free targets (observed targets when the dataset has
// none), both mapped with the observed target's min-max normalization. The
// basis is evaluated on the raw attributes.
InterpFit fit_interp(const Dataset& ds, const std::vector<expr::Expr>& basis, const PsoParams& pso,
                     Centering centering = Centering::signed_mean);

struct InterpFitRow {
  std::string dataset;
  std::vector<double> runs;
  double average = 0.0;
  InterpFit best;
};

// `repeat` PSO fits with seeds pso.seed + 0 .. repeat - 1.
InterpFitRow run_interp_fit(const Dataset& ds, const std::vector<expr::Expr>& basis, const PsoParams& pso, int repeat,
                     Centering centering = Centering::signed_mean);

struct MethodResult {
  std::string method;  // "LSSVM" or "ILSSVM"
  KernelSpec kernel;
  HyperParams hyper;
  EvalReport report;
};

struct BenchmarkResult {
  std::string dataset;
  std::vector<MethodResult> methods;  // LSSVM first, then ILSSVM
};

struct BenchmarkOptions {
  ModelSection model;
  std::size_t folds = 10;
  std::uint64_t fold_seed = 0;
  bool timing = true;
  Centering centering = Centering::signed_mean;
};

// Runs LSSVM and ILSSVM on identical folds. With model.tune both are tuned on
// the cross-validation objective (LSSVM on MSE alone, ILSSVM on the weighted
// MSE + R_ID). A sigma range pinned at zero makes ILSSVM reuse LSSVM's tuning.
BenchmarkResult run_benchmark(const Dataset& ds, const InterpModel& interp, const BenchmarkOptions& options);

// Interpretation model for a config: fixed coefficients if given, otherwise
// a single PSO fit with the interp seed.
InterpModel resolve_interp(const ExperimentConfig& cfg, const Dataset& ds);
std::vector<expr::Expr> resolve_basis(const ExperimentConfig& cfg);

std::string serialize_interp(const InterpModel& model);
InterpModel deserialize_interp(const std::string& text);

}  // namespace ilssvm
