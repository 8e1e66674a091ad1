#include "ilssvm/experiment.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "ilssvm/error.hpp"

namespace ilssvm {

std::vector<std::string> default_basis(std::string_view builtin) {
  if (builtin == "friedman1" || builtin == "friedman2") return {"sin(pi*x1*x2)", "(x3-0.5)^2", "x4", "x5"};
  if (builtin == "plane1" || builtin == "plane2") return {"x1", "x2"};
  if (builtin == "multi1" || builtin == "multi2") return {"1", "x1*x2", "x1*x4", "x2*x5", "x3*x4*x5"};
  if (builtin == "gabor1" || builtin == "gabor2") return {"exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))"};
  builtin_spec(builtin);  // throws with the list of valid names
  return {};
}

Dataset load_dataset(const DatasetSection& section) {
  if (section.csv) return read_csv(*section.csv);
  if (section.custom) return generate_dataset(*section.custom, section.seed);
  if (section.builtin) return generate_dataset(builtin_spec(*section.builtin), section.seed);
  throw ConfigError("[dataset]: one of builtin, csv or generator is required");
}

InterpFit fit_interp(const Dataset& ds, const std::vector<expr::Expr>& basis, const PsoParams& pso,
                     Centering centering) {
  const NormParams np = fit_norm(ds);
  const Vector target = apply_target_norm(np, ds.y_clean ? *ds.y_clean : ds.y);
  PsoResult res = pso_fit_interp(basis, ds.X, target, pso, centering);
  InterpFit fit;
  fit.model = std::move(res.model);
  // Undo the target scaling; the offset of the affine map is a constant,
  // which neither the interpretation distance nor the centred constraint sees.
  fit.model.mu *= 0.5 * (np.target.max - np.target.min);
  fit.fitness = res.fitness;
  return fit;
}

InterpFitRow run_interp_fit(const Dataset& ds, const std::vector<expr::Expr>& basis, const PsoParams& pso, int repeat,
                     Centering centering) {
  if (repeat < 1) throw InvalidArgument("repeat must be at least 1");
  InterpFitRow row;
  row.dataset = ds.name;
  double sum = 0.0;
  for (int r = 0; r < repeat; ++r) {
    PsoParams p = pso;
    p.seed = pso.seed + static_cast<std::uint64_t>(r);
    InterpFit fit = fit_interp(ds, basis, p, centering);
    row.runs.push_back(fit.fitness);
    sum += fit.fitness;
    if (r == 0 || fit.fitness < row.best.fitness) row.best = std::move(fit);
  }
  row.average = sum / repeat;
  return row;
}

namespace {

bool sigma_pinned_zero(const ModelSection& model) {
  if (!model.tune) return model.hyper.sigma == 0.0;
  return model.space.sigma.low == model.space.sigma.high && decode_sigma(model.space.sigma.low) == 0.0;
}

}  // namespace

BenchmarkResult run_benchmark(const Dataset& ds, const InterpModel& interp, const BenchmarkOptions& options) {
  const Vector p = interp_predict(interp, ds.X);
  const FoldPlan plan = kfold_split(ds.rows(), options.folds, options.fold_seed);
  CvOptions cv;
  cv.record_time = options.timing;
  cv.centering = options.centering;

  KernelSpec lssvm_kernel = options.model.kernel;
  HyperParams lssvm_hyper{options.model.hyper.phi, 0.0};
  KernelSpec ilssvm_kernel = options.model.kernel;
  HyperParams ilssvm_hyper = options.model.hyper;

  if (options.model.tune) {
    SearchSpace lspace = options.model.space;
    lspace.tune_sigma = false;
    const TuneResult lt = tune_hyperparams(ds, p, options.model.kernel, lspace, plan, TuneWeights{1.0, 0.0}, cv);
    lssvm_kernel = lt.kernel;
    lssvm_hyper = lt.hyper;
    if (sigma_pinned_zero(options.model)) {
      ilssvm_kernel = lt.kernel;
      ilssvm_hyper = lt.hyper;
    } else {
      const TuneResult it = tune_hyperparams(ds, p, options.model.kernel, options.model.space, plan,
                                             options.model.weights, cv);
      ilssvm_kernel = it.kernel;
      ilssvm_hyper = it.hyper;
    }
  }

  BenchmarkResult out;
  out.dataset = ds.name;
  out.methods.push_back({"LSSVM", lssvm_kernel, lssvm_hyper, cross_validate(ds, p, lssvm_kernel, lssvm_hyper, plan, cv)});
  out.methods.push_back(
      {"ILSSVM", ilssvm_kernel, ilssvm_hyper, cross_validate(ds, p, ilssvm_kernel, ilssvm_hyper, plan, cv)});
  return out;
}

std::vector<expr::Expr> resolve_basis(const ExperimentConfig& cfg) {
  std::vector<std::string> text = cfg.interp.basis;
  if (text.empty()) {
    if (!cfg.dataset.builtin)
      throw ConfigError("[interp] basis: required unless [dataset] builtin is set");
    text = default_basis(*cfg.dataset.builtin);
  }
  std::vector<expr::Expr> basis;
  for (const auto& t : text) {
    try {
      basis.push_back(expr::parse_expr(t));
    } catch (const ParseError& e) {
      throw ConfigError("[interp] basis term '" + t + "': " + e.what());
    }
  }
  return basis;
}

InterpModel resolve_interp(const ExperimentConfig& cfg, const Dataset& ds) {
  const auto basis = resolve_basis(cfg);
  if (cfg.interp.mu) {
    InterpModel m{basis, Eigen::Map<const Vector>(cfg.interp.mu->data(), static_cast<Eigen::Index>(cfg.interp.mu->size()))};
    m.validate(ds.dims());
    return m;
  }
  return fit_interp(ds, basis, cfg.interp.pso, cfg.interp.centering).model;
}

std::string serialize_interp(const InterpModel& model) {
  std::string out = "# coefficient \"basis term\"\n";
  for (std::size_t j = 0; j < model.basis.size(); ++j) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, model.mu(static_cast<Eigen::Index>(j)),
                                   std::chars_format::general, 17);
    out += "term ";
    out.append(buf, res.ptr);
    out += " \"" + expr::to_string(model.basis[j]) + "\"\n";
  }
  return out;
}

InterpModel deserialize_interp(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  InterpModel m;
  std::vector<double> mu;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("term ", 0) != 0) throw DataError("interp file line " + std::to_string(lineno) + ": expected 'term'");
    const std::size_t q1 = line.find('"');
    const std::size_t q2 = line.rfind('"');
    if (q1 == std::string::npos || q2 <= q1)
      throw DataError("interp file line " + std::to_string(lineno) + ": missing quoted basis term");
    std::string num = line.substr(5, q1 - 5);
    while (!num.empty() && num.back() == ' ') num.pop_back();
    double v = 0.0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), v);
    if (num.empty() || res.ec != std::errc() || res.ptr != num.data() + num.size())
      throw DataError("interp file line " + std::to_string(lineno) + ": bad coefficient '" + num + "'");
    mu.push_back(v);
    m.basis.push_back(expr::parse_expr(line.substr(q1 + 1, q2 - q1 - 1)));
  }
  if (m.basis.empty()) throw DataError("interp file has no terms");
  m.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  return m;
}

}  // namespace ilssvm
