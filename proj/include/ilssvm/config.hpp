#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ilssvm/bounds.hpp"
#include "ilssvm/data.hpp"
#include "ilssvm/interp.hpp"
#include "ilssvm/kernel.hpp"
#include "ilssvm/svm.hpp"
#include "ilssvm/tuning.hpp"

namespace ilssvm {

// Raw `[section] key = value` pairs in file order. Keys are unique per
// section; `#` and `;` start comment lines.
class ConfigFile {
public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  // One "section.key=value" line per entry in sorted order.
  std::string canonical() const;

  // 64-bit FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct DatasetSection {
  std::optional<std::string> builtin;
  std::optional<std::filesystem::path> csv;
  std::optional<DatasetSpec> custom;
  std::uint64_t seed = 0;
};

struct InterpSection {
  std::vector<std::string> basis;  // empty: builtin default
  std::optional<std::vector<double>> mu;
  PsoParams pso;
  Centering centering = Centering::signed_mean;
};

enum class Method { lssvm, ilssvm };

struct ModelSection {
  Method method = Method::ilssvm;
  KernelSpec kernel = KernelSpec::rbf(1.0);
  HyperParams hyper{10.0, 1.0};
  bool tune = false;
  SearchSpace space;
  TuneWeights weights{1.0, 1.0};  // used for ILSSVM; LSSVM always tunes on MSE alone
};

struct ProtocolSection {
  std::size_t folds = 10;
  std::uint64_t fold_seed = 0;
  int repeat = 10;
};

struct OutputSection {
  std::filesystem::path dir = ".";
  bool timing = true;
};

struct ExperimentConfig {
  DatasetSection dataset;
  InterpSection interp;
  ModelSection model;
  ProtocolSection protocol;
  OutputSection output;
  BoundInputs bounds;
  std::string hash;
};

// Validates every known key; unknown sections or keys and malformed values
// raise ConfigError naming the section and key.
ExperimentConfig build_config(const ConfigFile& file);

// Helpers shared with the CLI flag parser.
std::vector<std::string> parse_string_list(const std::string& value);
std::vector<double> parse_number_list(const std::string& value);
std::vector<NoiseLayer> parse_noise_plan(const std::string& value);

}  // namespace ilssvm
