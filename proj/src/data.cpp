#include "ilssvm/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "ilssvm/error.hpp"
#include "ilssvm/rng.hpp"

namespace ilssvm {

void Dataset::validate() const {
  if (static_cast<std::size_t>(y.size()) != rows())
    throw DataError("target length " + std::to_string(y.size()) + " does not match " +
                    std::to_string(rows()) + " rows");
  if (y_clean && static_cast<std::size_t>(y_clean->size()) != rows())
    throw DataError("y_clean length does not match row count");
  if (attr_names.size() != dims())
    throw DataError("expected " + std::to_string(dims()) + " attribute names, got " +
                    std::to_string(attr_names.size()));
  std::set<std::string> seen;
  for (const auto& n : attr_names) {
    if (n.empty()) throw DataError("empty attribute name");
    if (!seen.insert(n).second) throw DataError("duplicate attribute name '" + n + "'");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  if (y_clean) out.y_clean = Vector(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(idx[r]);
    const auto dst = static_cast<Eigen::Index>(r);
    out.X.row(dst) = X.row(src);
    out.y(dst) = y(src);
    if (y_clean) (*out.y_clean)(dst) = (*y_clean)(src);
  }
  out.attr_names = attr_names;
  out.name = name;
  out.seed = seed;
  return out;
}

void DatasetSpec::validate() const {
  if (n_samples == 0) throw DataError(name + ": n_samples must be positive");
  if (input_ranges.empty()) throw DataError(name + ": at least one input range is required");
  for (const auto& r : input_ranges) {
    if (!(r.low < r.high)) throw DataError(name + ": input range needs low < high");
  }
  if (generator.empty()) throw DataError(name + ": generator expression missing");
  if (static_cast<std::size_t>(generator.max_variable()) > input_ranges.size())
    throw DataError(name + ": generator references x" + std::to_string(generator.max_variable()) +
                    " but only " + std::to_string(input_ranges.size()) + " inputs are defined");
  for (const auto& layer : noise) {
    std::vector<NoiseSegment> segs = layer.segments;
    std::sort(segs.begin(), segs.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].begin > segs[i].end || segs[i].end > n_samples)
        throw DataError(name + ": noise range outside [0, n_samples)");
      if (segs[i].stddev < 0.0) throw DataError(name + ": negative noise standard deviation");
      if (i > 0 && segs[i].begin < segs[i - 1].end) throw DataError(name + ": overlapping noise ranges");
    }
  }
  if (nuisance_stddev < 0.0) throw DataError(name + ": negative nuisance standard deviation");
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"friedman1", "friedman2", "gabor1", "gabor2",
                                                 "multi1",    "multi2",    "plane1", "plane2"};
  return names;
}

namespace {

constexpr const char* kFriedman = "10*sin(pi*x1*x2) + 20*(x3-0.5)^2 + 10*x4 + 5*x5";
constexpr const char* kPlane = "0.6*x1 + 0.3*x2";
constexpr const char* kMulti = "0.79 + 1.27*x1*x2 + 1.56*x1*x4 + 3.42*x2*x5 + 2.06*x3*x4*x5";
constexpr const char* kGabor = "pi*exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))/2";

DatasetSpec make_spec(std::string name, const char* gen, std::size_t dims, InputRange range) {
  DatasetSpec s;
  s.name = std::move(name);
  s.generator_text = gen;
  s.generator = expr::parse_expr(gen);
  s.n_samples = 60;
  s.input_ranges.assign(dims, range);
  return s;
}

NoiseLayer uniform_layer(std::size_t n, double stddev) {
  return NoiseLayer{false, {NoiseSegment{0, n, 0.0, stddev}}};
}

}  // namespace

DatasetSpec builtin_spec(std::string_view name) {
  const InputRange sym{-1.0, 1.0};
  if (name == "friedman1" || name == "friedman2") {
    DatasetSpec s = make_spec(std::string(name), kFriedman, 5, InputRange{0.0, 1.0});
    s.noise.push_back(NoiseLayer{true, {{0, 30, 0.0, 1.0}, {30, 60, 0.0, 5.0}}});
    if (name == "friedman2")
      s.noise.push_back(NoiseLayer{false, {{0, 20, 0.0, 1.0}, {20, 40, 0.0, 2.0}, {40, 60, 0.0, 3.0}}});
    return s;
  }
  if (name == "plane1" || name == "plane2") {
    DatasetSpec s = make_spec(std::string(name), kPlane, 2, sym);
    s.noise.push_back(uniform_layer(60, 1.0));
    if (name == "plane2") s.nuisance_count = 1;
    return s;
  }
  if (name == "multi1" || name == "multi2") {
    DatasetSpec s = make_spec(std::string(name), kMulti, 5, sym);
    s.noise.push_back(uniform_layer(60, 1.0));
    if (name == "multi2") s.nuisance_count = 5;
    return s;
  }
  if (name == "gabor1") {
    DatasetSpec s = make_spec(std::string(name), kGabor, 2, sym);
    s.noise.push_back(uniform_layer(60, 1.0));
    return s;
  }
  if (name == "gabor2") {
    DatasetSpec s = make_spec(std::string(name), kGabor, 2, sym);
    s.noise.push_back(NoiseLayer{false, {{0, 30, 0.0, 0.1}, {30, 60, 0.0, 0.5}}});
    return s;
  }
  std::string valid;
  for (const auto& n : builtin_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw DataError("unknown builtin dataset '" + std::string(name) + "' (valid: " + valid + ")");
}

Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = spec.n_samples;
  const std::size_t d = spec.input_ranges.size();
  const std::size_t total = d + spec.nuisance_count;
  Rng rng(seed);

  Dataset ds;
  ds.name = spec.name;
  ds.seed = seed;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(total));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto& r = spec.input_ranges[j];
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.uniform(r.low, r.high);
    }
  }

  Vector clean(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    clean(row) = spec.generator(std::span<const double>(ds.X.row(row).data(), d));
  }

  Vector y = clean;
  for (const auto& layer : spec.noise) {
    std::vector<std::size_t> order;
    if (layer.permuted) order = rng.permutation(n);
    for (const auto& seg : layer.segments) {
      for (std::size_t k = seg.begin; k < seg.end; ++k) {
        const std::size_t row = layer.permuted ? order[k] : k;
        y(static_cast<Eigen::Index>(row)) += rng.normal(seg.mean, seg.stddev);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = d; j < total; ++j) {
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.normal(spec.nuisance_mean, spec.nuisance_stddev);
    }
  }

  ds.y = std::move(y);
  ds.y_clean = std::move(clean);
  for (std::size_t j = 0; j < total; ++j) ds.attr_names.push_back("x" + std::to_string(j + 1));
  return ds;
}

namespace {

ColumnRange column_range(const auto& col, const std::string& label) {
  const double lo = col.minCoeff();
  const double hi = col.maxCoeff();
  if (!(hi > lo)) throw DataError("cannot normalize constant column '" + label + "'");
  return {lo, hi};
}

double to_unit(const ColumnRange& r, double v) { return 2.0 * (v - r.min) / (r.max - r.min) - 1.0; }
double from_unit(const ColumnRange& r, double v) { return (v + 1.0) * (r.max - r.min) / 2.0 + r.min; }

}  // namespace

NormParams fit_norm(const Dataset& ds) {
  if (ds.rows() == 0) throw DataError("cannot normalize an empty dataset");
  NormParams p;
  for (std::size_t j = 0; j < ds.dims(); ++j) {
    const std::string label = j < ds.attr_names.size() ? ds.attr_names[j] : "x" + std::to_string(j + 1);
    p.inputs.push_back(column_range(ds.X.col(static_cast<Eigen::Index>(j)), label));
  }
  p.target = column_range(ds.y, "y");
  return p;
}

std::pair<Dataset, NormParams> normalize_minmax(const Dataset& ds) {
  NormParams p = fit_norm(ds);
  return {apply_norm(p, ds), p};
}

Matrix apply_input_norm(const NormParams& params, const Matrix& X) {
  if (params.inputs.size() != static_cast<std::size_t>(X.cols()))
    throw DataError("normalization has " + std::to_string(params.inputs.size()) + " input columns, data has " +
                    std::to_string(X.cols()));
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      out(i, j) = to_unit(params.inputs[static_cast<std::size_t>(j)], X(i, j));
  return out;
}

Vector apply_target_norm(const NormParams& params, const Vector& values) {
  return values.unaryExpr([&](double v) { return to_unit(params.target, v); });
}

Vector invert_norm(const NormParams& params, const Vector& values) {
  return values.unaryExpr([&](double v) { return from_unit(params.target, v); });
}

Dataset apply_norm(const NormParams& params, const Dataset& ds) {
  Dataset out = ds;
  out.X = apply_input_norm(params, ds.X);
  out.y = apply_target_norm(params, ds.y);
  if (ds.y_clean) out.y_clean = apply_target_norm(params, *ds.y_clean);
  return out;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::string to_csv(const Dataset& ds) {
  ds.validate();
  std::string out;
  for (const auto& n : ds.attr_names) out += n + ",";
  out += ds.y_clean ? "y,y_clean\n" : "y\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < ds.dims(); ++j) {
      append_number(out, ds.X(r, static_cast<Eigen::Index>(j)));
      out += ',';
    }
    append_number(out, ds.y(r));
    if (ds.y_clean) {
      out += ',';
      append_number(out, (*ds.y_clean)(r));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
  f << to_csv(ds);
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

Dataset parse_csv(std::string_view text, std::string name) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty()) throw DataError("empty CSV: missing header");

  const auto header = split_commas(lines[0]);
  const auto y_it = std::find(header.begin(), header.end(), "y");
  if (y_it == header.end()) throw DataError("CSV header is missing required column 'y'");
  const auto y_col = static_cast<std::size_t>(y_it - header.begin());
  bool has_clean = false;
  if (header.size() == y_col + 2 && header[y_col + 1] == "y_clean") {
    has_clean = true;
  } else if (header.size() != y_col + 1) {
    throw DataError("malformed CSV header: unexpected column '" + std::string(header[y_col + 1]) +
                    "' after 'y' (only 'y_clean' is allowed)");
  }

  Dataset ds;
  ds.name = std::move(name);
  for (std::size_t j = 0; j < y_col; ++j) ds.attr_names.emplace_back(header[j]);

  const std::size_t n = lines.size() - 1;
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(y_col));
  ds.y.resize(static_cast<Eigen::Index>(n));
  if (has_clean) ds.y_clean = Vector(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split_commas(lines[i + 1]);
    if (cells.size() != header.size())
      throw DataError("ragged CSV: line " + std::to_string(i + 2) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      const char* first = cells[j].data();
      const char* last = first + cells[j].size();
      const auto res = std::from_chars(first, last, v);
      if (cells[j].empty() || res.ec != std::errc() || res.ptr != last)
        throw DataError("non-numeric cell '" + std::string(cells[j]) + "' at line " + std::to_string(i + 2) +
                        ", column '" + std::string(header[j]) + "'");
      const auto r = static_cast<Eigen::Index>(i);
      if (j < y_col) {
        ds.X(r, static_cast<Eigen::Index>(j)) = v;
      } else if (j == y_col) {
        ds.y(r) = v;
      } else {
        (*ds.y_clean)(r) = v;
      }
    }
  }
  ds.validate();
  return ds;
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str(), path.stem().string());
}

}  // namespace ilssvm
