#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ilssvm/expr.hpp"
#include "ilssvm/types.hpp"

namespace ilssvm {

struct Dataset {
  Matrix X;
  Vector y;                       // observed (noisy) targets
  std::optional<Vector> y_clean;  // generator output before noise
  std::vector<std::string> attr_names;
  std::string name;
  std::uint64_t seed = 0;

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(X.cols()); }

  // Row-count and attribute-name invariants; throws DataError.
  void validate() const;

  Dataset subset(std::span<const std::size_t> rows) const;
};

// Rows [begin, end) receive N(mean, stddev) noise.
struct NoiseSegment {
  std::size_t begin = 0;
  std::size_t end = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

// Segments in one layer are disjoint. A permuted layer addresses positions of
// a seeded row permutation instead of row indices, which is how "30 random
// samples" style noise is expressed. Layers add up.
struct NoiseLayer {
  bool permuted = false;
  std::vector<NoiseSegment> segments;
};

struct InputRange {
  double low = 0.0;
  double high = 1.0;
};

struct DatasetSpec {
  std::string name;
  std::string generator_text;
  expr::Expr generator;
  std::size_t n_samples = 0;
  std::vector<InputRange> input_ranges;
  std::vector<NoiseLayer> noise;
  std::size_t nuisance_count = 0;
  double nuisance_mean = 0.0;
  double nuisance_stddev = 1.0;

  void validate() const;
};

const std::vector<std::string>& builtin_names();

// friedman1, friedman2, plane1, plane2, multi1, multi2, gabor1, gabor2.
DatasetSpec builtin_spec(std::string_view name);

// Draw order: inputs row by row, noise layers in order, nuisance columns.
Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed);

struct ColumnRange {
  double min = -1.0;
  double max = 1.0;
};

// Per-column min/max of the inputs and the target; maps each to [-1, 1].
struct NormParams {
  std::vector<ColumnRange> inputs;
  ColumnRange target;
};

NormParams fit_norm(const Dataset& ds);
std::pair<Dataset, NormParams> normalize_minmax(const Dataset& ds);
Dataset apply_norm(const NormParams& params, const Dataset& ds);
Matrix apply_input_norm(const NormParams& params, const Matrix& X);
Vector apply_target_norm(const NormParams& params, const Vector& values);
Vector invert_norm(const NormParams& params, const Vector& values);

// Header x1..xd,y[,y_clean]; values written with 17 significant digits.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);
Dataset read_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text, std::string name = "dataset");

}  // namespace ilssvm
