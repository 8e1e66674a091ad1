#include "ilssvm/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ilssvm/error.hpp"

namespace ilssvm {

ConfigFile ConfigFile::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  ConfigFile cfg;
  for (const auto& [section, child] : tree) {
    if (child.empty())
      throw ConfigError("key '" + section + "' appears outside any [section]");
    for (const auto& [key, value] : child) cfg.sections_[section][key] = value.data();
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse(buf.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

std::string ConfigFile::canonical() const {
  std::string out;
  for (const auto& [section, keys] : sections_)
    for (const auto& [key, value] : keys) out += section + "." + key + "=" + value + "\n";
  return out;
}

std::string ConfigFile::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

double to_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  return v;
}

class Reader {
public:
  explicit Reader(const ConfigFile& f) : file_(f) {}

  std::optional<std::string> str(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    auto v = file_.get(section, key);
    if (v) *v = trim(*v);
    return v;
  }

  template <class T>
  void number(const std::string& section, const std::string& key, T& out) {
    if (auto v = str(section, key)) {
      const double d = to_number(*v, where(section, key));
      if constexpr (std::is_integral_v<T>) {
        if (d != std::floor(d) || d < 0) throw ConfigError(where(section, key) + ": expected a non-negative integer");
        out = static_cast<T>(d);
      } else {
        out = static_cast<T>(d);
      }
    }
  }

  void boolean(const std::string& section, const std::string& key, bool& out) {
    if (auto v = str(section, key)) {
      if (*v == "true" || *v == "1" || *v == "yes") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no") {
        out = false;
      } else {
        throw ConfigError(where(section, key) + ": expected true or false, got '" + *v + "'");
      }
    }
  }

  void range(const std::string& section, const std::string& key, double& low, double& high) {
    if (auto v = str(section, key)) {
      const auto parts = split(*v, ':');
      if (parts.size() != 2) throw ConfigError(where(section, key) + ": expected low:high");
      low = to_number(parts[0], where(section, key));
      high = to_number(parts[1], where(section, key));
    }
  }

  static std::string where(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
  }

  void reject_unknown() const {
    for (const auto& [section, keys] : file_.sections()) {
      for (const auto& [key, value] : keys) {
        if (!used_.count(section + "." + key))
          throw ConfigError("unknown key " + where(section, key));
      }
    }
  }

private:
  const ConfigFile& file_;
  std::set<std::string> used_;
};

}  // namespace

std::vector<std::string> parse_string_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const auto skip = [&] {
    while (i < value.size() && std::isspace(static_cast<unsigned char>(value[i]))) ++i;
  };
  skip();
  if (i == value.size()) return out;
  for (;;) {
    skip();
    std::string item;
    if (i < value.size() && value[i] == '"') {
      const std::size_t close = value.find('"', i + 1);
      if (close == std::string::npos) throw ConfigError("unterminated quoted string in '" + value + "'");
      item = value.substr(i + 1, close - i - 1);
      i = close + 1;
    } else {
      const std::size_t comma = value.find(',', i);
      item = trim(value.substr(i, comma == std::string::npos ? std::string::npos : comma - i));
      i = comma == std::string::npos ? value.size() : comma;
    }
    if (item.empty()) throw ConfigError("empty item in list '" + value + "'");
    out.push_back(item);
    skip();
    if (i == value.size()) break;
    if (value[i] != ',') throw ConfigError("expected ',' in list '" + value + "'");
    ++i;
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& value) {
  std::vector<double> out;
  for (const auto& part : split(value, ',')) out.push_back(to_number(part, "list '" + value + "'"));
  return out;
}

std::vector<NoiseLayer> parse_noise_plan(const std::string& value) {
  std::vector<NoiseLayer> layers;
  for (std::string layer_text : split(value, ';')) {
    NoiseLayer layer;
    if (layer_text.rfind("perm", 0) == 0) {
      layer.permuted = true;
      layer_text = trim(layer_text.substr(4));
    }
    for (const auto& seg : split(layer_text, ',')) {
      const auto f = split(seg, ':');
      if (f.size() != 4) throw ConfigError("noise segment '" + seg + "' must be begin:end:mean:std");
      const double begin = to_number(f[0], "noise begin");
      const double end = to_number(f[1], "noise end");
      if (begin < 0 || end < 0 || begin != std::floor(begin) || end != std::floor(end))
        throw ConfigError("noise segment '" + seg + "' needs integer row bounds");
      layer.segments.push_back({static_cast<std::size_t>(begin), static_cast<std::size_t>(end),
                                to_number(f[2], "noise mean"), to_number(f[3], "noise std")});
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

ExperimentConfig build_config(const ConfigFile& file) {
  Reader r(file);
  ExperimentConfig cfg;

  auto& ds = cfg.dataset;
  r.number("dataset", "seed", ds.seed);
  if (auto b = r.str("dataset", "builtin")) ds.builtin = *b;
  if (auto c = r.str("dataset", "csv")) ds.csv = *c;
  if (auto g = r.str("dataset", "generator")) {
    DatasetSpec spec;
    const auto items = parse_string_list(*g);
    if (items.size() != 1) throw ConfigError("[dataset] generator: expected one expression");
    spec.generator_text = items[0];
    try {
      spec.generator = expr::parse_expr(items[0]);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("[dataset] generator: ") + e.what());
    }
    spec.name = r.str("dataset", "name").value_or("custom");
    r.number("dataset", "samples", spec.n_samples);
    if (auto ranges = r.str("dataset", "ranges")) {
      for (const auto& part : split(*ranges, ',')) {
        const auto lh = split(part, ':');
        if (lh.size() != 2) throw ConfigError("[dataset] ranges: expected low:high pairs");
        spec.input_ranges.push_back({to_number(lh[0], "[dataset] ranges"), to_number(lh[1], "[dataset] ranges")});
      }
    } else {
      throw ConfigError("[dataset] ranges: required with a custom generator");
    }
    if (auto noise = r.str("dataset", "noise")) spec.noise = parse_noise_plan(*noise);
    r.number("dataset", "nuisance", spec.nuisance_count);
    r.range("dataset", "nuisance_noise", spec.nuisance_mean, spec.nuisance_stddev);
    try {
      spec.validate();
    } catch (const DataError& e) {
      throw ConfigError(std::string("[dataset] ") + e.what());
    }
    ds.custom = std::move(spec);
  }
  const int sources = (ds.builtin ? 1 : 0) + (ds.csv ? 1 : 0) + (ds.custom ? 1 : 0);
  if (sources > 1) throw ConfigError("[dataset]: set only one of builtin, csv, generator");
  if (ds.builtin) builtin_spec(*ds.builtin);  // validates the name

  auto& in = cfg.interp;
  if (auto b = r.str("interp", "basis")) in.basis = parse_string_list(*b);
  if (auto m = r.str("interp", "mu")) in.mu = parse_number_list(*m);
  r.number("interp", "swarm", in.pso.swarm_size);
  r.number("interp", "iterations", in.pso.iterations);
  r.number("interp", "inertia", in.pso.inertia);
  r.number("interp", "cognitive", in.pso.cognitive);
  r.number("interp", "social", in.pso.social);
  r.range("interp", "bounds", in.pso.low, in.pso.high);
  r.number("interp", "seed", in.pso.seed);
  if (auto c = r.str("interp", "centering")) {
    if (*c == "signed") {
      in.centering = Centering::signed_mean;
    } else if (*c == "absolute") {
      in.centering = Centering::absolute_mean;
    } else {
      throw ConfigError("[interp] centering: expected signed or absolute, got '" + *c + "'");
    }
  }
  if (in.mu && in.mu->size() != in.basis.size())
    throw ConfigError("[interp] mu: " + std::to_string(in.mu->size()) + " coefficients for " +
                      std::to_string(in.basis.size()) + " basis terms");
  try {
    in.pso.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[interp] ") + e.what());
  }

  auto& md = cfg.model;
  if (auto m = r.str("model", "method")) {
    if (*m == "ilssvm") {
      md.method = Method::ilssvm;
    } else if (*m == "lssvm") {
      md.method = Method::lssvm;
    } else {
      throw ConfigError("[model] method: expected lssvm or ilssvm, got '" + *m + "'");
    }
  }
  if (auto k = r.str("model", "kernel")) {
    try {
      md.kernel.family = parse_kernel_family(*k);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("[model] kernel: ") + e.what());
    }
  }
  r.number("model", "width", md.kernel.width);
  r.number("model", "degree", md.kernel.degree);
  r.number("model", "offset", md.kernel.offset);
  r.number("model", "phi", md.hyper.phi);
  r.number("model", "sigma", md.hyper.sigma);
  r.boolean("model", "tune", md.tune);
  r.range("model", "width_range", md.space.width.low, md.space.width.high);
  r.range("model", "phi_range", md.space.phi.low, md.space.phi.high);
  r.range("model", "sigma_range", md.space.sigma.low, md.space.sigma.high);
  r.number("model", "grid", md.space.grid_points);
  r.boolean("model", "grid_only", md.space.grid_only);
  r.number("model", "max_iters", md.space.simplex.max_iters);
  r.number("model", "tol", md.space.simplex.tol);
  r.number("model", "weight_mse", md.weights.mse);
  r.number("model", "weight_id", md.weights.id);
  if (md.method == Method::lssvm) md.hyper.sigma = 0.0;
  try {
    md.kernel.validate();
    md.hyper.validate();
    md.space.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[model] ") + e.what());
  }

  auto& pr = cfg.protocol;
  r.number("protocol", "folds", pr.folds);
  r.number("protocol", "fold_seed", pr.fold_seed);
  r.number("protocol", "repeat", pr.repeat);
  if (pr.folds < 2) throw ConfigError("[protocol] folds: must be at least 2");
  if (pr.repeat < 1) throw ConfigError("[protocol] repeat: must be at least 1");

  if (auto d = r.str("output", "dir")) cfg.output.dir = *d;
  r.boolean("output", "timing", cfg.output.timing);

  auto& bd = cfg.bounds;
  r.number("bounds", "m", bd.m);
  r.number("bounds", "delta", bd.delta);
  r.number("bounds", "M", bd.M);
  r.number("bounds", "M_P", bd.M_P);
  r.number("bounds", "tau", bd.tau);
  r.number("bounds", "D", bd.D);
  r.number("bounds", "sigma_rho_sq", bd.sigma_rho_sq);
  r.number("bounds", "C_E", bd.C_E);
  r.number("bounds", "ell_E", bd.ell_E);
  r.number("bounds", "J_norm", bd.J_norm);
  if (auto c2 = r.str("bounds", "c2")) bd.c2 = to_number(*c2, "[bounds] c2");

  r.reject_unknown();
  cfg.hash = file.hash();
  return cfg;
}

}  // namespace ilssvm
