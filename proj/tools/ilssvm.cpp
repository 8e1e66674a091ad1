#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ilssvm/bounds.hpp"
#include "ilssvm/config.hpp"
#include "ilssvm/error.hpp"
#include "ilssvm/experiment.hpp"
#include "ilssvm/metrics.hpp"
#include "ilssvm/report.hpp"
#include "ilssvm/svm.hpp"

namespace fs = std::filesystem;
using namespace ilssvm;

namespace {

// Flags override config entries before validation, so the report hash covers
// the effective configuration.
struct Overrides {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string*>> flags;  // "section.key" -> flag storage

  void bind(CLI::App* app, const std::string& flag, const std::string& key, std::string* storage,
            const std::string& help) {
    app->add_option(flag, *storage, help);
    flags.emplace_back(key, storage);
  }

  ConfigFile file() const {
    ConfigFile f = config_path.empty() ? ConfigFile{} : ConfigFile::load(config_path);
    auto apply = [&](const std::string& dotted, const std::string& value) {
      const auto dot = dotted.find('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
        throw ConfigError("override '" + dotted + "' must be section.key=value");
      f.set(dotted.substr(0, dot), dotted.substr(dot + 1), value);
    };
    for (const auto& [key, storage] : flags)
      if (!storage->empty()) apply(key, *storage);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("override '" + s + "' must be section.key=value");
      apply(s.substr(0, eq), s.substr(eq + 1));
    }
    return f;
  }
};

void add_common(CLI::App* app, Overrides& ov) {
  app->add_option("-c,--config", ov.config_path, "Experiment config file");
  app->add_option("--set", ov.sets, "Override a config entry, section.key=value (repeatable)");
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sidecar(const ConfigFile& file, const ExperimentConfig& cfg, const Dataset& ds) {
  std::string out = "config_hash=" + cfg.hash + "\n";
  out += "dataset=" + ds.name + "\n";
  out += "seed=" + std::to_string(ds.seed) + "\n";
  out += "rows=" + std::to_string(ds.rows()) + "\n";
  out += "dims=" + std::to_string(ds.dims()) + "\n";
  out += "[config]\n" + file.canonical();
  return out;
}

ExperimentConfig for_builtin(ExperimentConfig cfg, const std::string& name) {
  cfg.dataset.builtin = name;
  cfg.dataset.csv.reset();
  cfg.dataset.custom.reset();
  cfg.interp.basis.clear();
  cfg.interp.mu.reset();
  return cfg;
}

BenchmarkOptions benchmark_options(const ExperimentConfig& cfg) {
  BenchmarkOptions o;
  o.model = cfg.model;
  o.folds = cfg.protocol.folds;
  o.fold_seed = cfg.protocol.fold_seed;
  o.timing = cfg.output.timing;
  o.centering = cfg.interp.centering;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpretability-constrained least-squares SVM experiments"};
  app.require_subcommand(1);

  // generate
  Overrides gen_ov;
  std::string gen_builtin, gen_seed, gen_output;
  auto* gen = app.add_subcommand("generate", "Write a dataset CSV and a .meta sidecar");
  add_common(gen, gen_ov);
  gen_ov.bind(gen, "--builtin", "dataset.builtin", &gen_builtin, "Builtin dataset name");
  gen_ov.bind(gen, "--seed", "dataset.seed", &gen_seed, "Dataset seed");
  gen->add_option("-o,--output", gen_output, "Output CSV (default <output.dir>/<name>.csv)");

  // fit-interp
  Overrides fit_ov;
  std::string fit_builtin, fit_seed, fit_repeat, fit_pso_seed, fit_basis, fit_dir;
  bool fit_all = false;
  auto* fit = app.add_subcommand("fit-interp", "Fit interpretation models by PSO and report their distances");
  add_common(fit, fit_ov);
  fit_ov.bind(fit, "--builtin", "dataset.builtin", &fit_builtin, "Builtin dataset name");
  fit_ov.bind(fit, "--seed", "dataset.seed", &fit_seed, "Dataset seed");
  fit_ov.bind(fit, "--repeat", "protocol.repeat", &fit_repeat, "Number of PSO runs");
  fit_ov.bind(fit, "--pso-seed", "interp.seed", &fit_pso_seed, "Seed of the first PSO run");
  fit_ov.bind(fit, "--basis", "interp.basis", &fit_basis, "Quoted, comma separated basis expressions");
  fit->add_flag("--all", fit_all, "Run every builtin dataset with its default basis");
  fit->add_option("-o,--output-dir", fit_dir, "Output directory (default output.dir)");

  // train
  Overrides tr_ov;
  std::string tr_builtin, tr_csv, tr_seed, tr_method, tr_kernel, tr_width, tr_phi, tr_sigma, tr_tune;
  std::string tr_interp, tr_output;
  auto* tr = app.add_subcommand("train", "Train a model on the whole dataset and save it");
  add_common(tr, tr_ov);
  tr_ov.bind(tr, "--builtin", "dataset.builtin", &tr_builtin, "Builtin dataset name");
  tr_ov.bind(tr, "--csv", "dataset.csv", &tr_csv, "Dataset CSV");
  tr_ov.bind(tr, "--seed", "dataset.seed", &tr_seed, "Dataset seed");
  tr_ov.bind(tr, "--method", "model.method", &tr_method, "lssvm or ilssvm");
  tr_ov.bind(tr, "--kernel", "model.kernel", &tr_kernel, "rbf, linear or polynomial");
  tr_ov.bind(tr, "--width", "model.width", &tr_width, "RBF width");
  tr_ov.bind(tr, "--phi", "model.phi", &tr_phi, "Prediction slack weight");
  tr_ov.bind(tr, "--sigma", "model.sigma", &tr_sigma, "Interpretability slack weight");
  tr_ov.bind(tr, "--tune", "model.tune", &tr_tune, "true to tune by cross-validation first");
  tr->add_option("--interp", tr_interp, "Interpretation model file (default: fit from config)");
  tr->add_option("-o,--output", tr_output, "Model file")->required();

  // predict
  std::string pr_model, pr_input, pr_output;
  auto* pr = app.add_subcommand("predict", "Predict a dataset CSV with a saved model");
  pr->add_option("-m,--model", pr_model, "Model file")->required();
  pr->add_option("-i,--input", pr_input, "Dataset CSV")->required();
  pr->add_option("-o,--output", pr_output, "Prediction CSV (default stdout)");

  // benchmark
  Overrides bm_ov;
  std::string bm_builtin, bm_seed, bm_sigma, bm_tune, bm_folds, bm_fold_seed, bm_dir;
  bool bm_all = false, bm_no_timing = false;
  auto* bm = app.add_subcommand("benchmark", "Cross-validate LSSVM and ILSSVM on identical folds");
  add_common(bm, bm_ov);
  bm_ov.bind(bm, "--builtin", "dataset.builtin", &bm_builtin, "Builtin dataset name");
  bm_ov.bind(bm, "--seed", "dataset.seed", &bm_seed, "Dataset seed");
  bm_ov.bind(bm, "--tune", "model.tune", &bm_tune, "true or false");
  bm_ov.bind(bm, "--folds", "protocol.folds", &bm_folds, "Number of folds");
  bm_ov.bind(bm, "--fold-seed", "protocol.fold_seed", &bm_fold_seed, "Fold assignment seed");
  bm->add_option("--sigma", bm_sigma, "Fix sigma (also pins the tuning range when it is 0)");
  bm->add_flag("--all", bm_all, "Run all builtin datasets");
  bm->add_flag("--no-timing", bm_no_timing, "Write 0 for D_time so reports are byte-identical");
  bm->add_option("-o,--output-dir", bm_dir, "Output directory (default output.dir)");

  // bounds
  Overrides bd_ov;
  std::string bd_m, bd_delta, bd_M, bd_MP, bd_tau, bd_D, bd_srho, bd_CE, bd_ell, bd_J, bd_c2;
  std::string bd_sweep, bd_output;
  double bd_from = 0, bd_to = 0;
  int bd_points = 5;
  auto* bd = app.add_subcommand("bounds", "Evaluate the equilibrium error bound");
  add_common(bd, bd_ov);
  bd_ov.bind(bd, "--m", "bounds.m", &bd_m, "Sample count");
  bd_ov.bind(bd, "--delta", "bounds.delta", &bd_delta, "Confidence parameter in (0, 1)");
  bd_ov.bind(bd, "--M", "bounds.M", &bd_M, "Bound on |f - y|");
  bd_ov.bind(bd, "--M-P", "bounds.M_P", &bd_MP, "Bound on the centred interpretation residual");
  bd_ov.bind(bd, "--tau", "bounds.tau", &bd_tau, "Trade-off weight");
  bd_ov.bind(bd, "--D", "bounds.D", &bd_D, "Operator norm constant");
  bd_ov.bind(bd, "--sigma-rho-sq", "bounds.sigma_rho_sq", &bd_srho, "Noise variance");
  bd_ov.bind(bd, "--C-E", "bounds.C_E", &bd_CE, "Covering constant");
  bd_ov.bind(bd, "--ell-E", "bounds.ell_E", &bd_ell, "Covering exponent");
  bd_ov.bind(bd, "--J-norm", "bounds.J_norm", &bd_J, "Norm folded into c2");
  bd_ov.bind(bd, "--c2", "bounds.c2", &bd_c2, "Explicit c2");
  bd->add_option("--sweep", bd_sweep, "Sweep m or delta")->check(CLI::IsMember({"m", "delta"}));
  bd->add_option("--from", bd_from, "Sweep start");
  bd->add_option("--to", bd_to, "Sweep end");
  bd->add_option("--points", bd_points, "Sweep points (log spaced for m, linear for delta)");
  bd->add_option("-o,--output", bd_output, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    std::fprintf(stderr, "error: usage: %s\n", msg.c_str());
    return 2;
  }

  try {
    if (gen->parsed()) {
      const ConfigFile file = gen_ov.file();
      const ExperimentConfig cfg = build_config(file);
      const Dataset ds = load_dataset(cfg.dataset);
      const fs::path out = gen_output.empty() ? cfg.output.dir / (ds.name + ".csv") : fs::path(gen_output);
      write_file(out, to_csv(ds));
      write_file(out.string() + ".meta", sidecar(file, cfg, ds));
      std::printf("%s\n", out.string().c_str());
    } else if (fit->parsed()) {
      const ConfigFile file = fit_ov.file();
      const ExperimentConfig cfg = build_config(file);
      const fs::path dir = fit_dir.empty() ? cfg.output.dir : fs::path(fit_dir);
      std::vector<std::string> names;
      if (fit_all) {
        names = builtin_names();
      } else {
        names.push_back("");
      }
      std::vector<InterpFitRow> rows;
      for (const auto& name : names) {
        const ExperimentConfig c = name.empty() ? cfg : for_builtin(cfg, name);
        const Dataset ds = load_dataset(c.dataset);
        rows.push_back(run_interp_fit(ds, resolve_basis(c), c.interp.pso, c.protocol.repeat, c.interp.centering));
        write_file(dir / (ds.name + ".interp"), serialize_interp(rows.back().best.model));
      }
      const std::string csv = interp_fit_csv(rows, cfg.hash);
      write_file(dir / "interp_fit.csv", csv);
      std::fputs(csv.c_str(), stdout);
    } else if (tr->parsed()) {
      const ConfigFile file = tr_ov.file();
      const ExperimentConfig cfg = build_config(file);
      const Dataset ds = load_dataset(cfg.dataset);
      const InterpModel interp = tr_interp.empty() ? resolve_interp(cfg, ds) : deserialize_interp(read_file(tr_interp));
      interp.validate(ds.dims());
      const Vector p_raw = interp_predict(interp, ds.X);

      KernelSpec kernel = cfg.model.kernel;
      HyperParams hyper = cfg.model.hyper;
      if (cfg.model.method == Method::lssvm) hyper.sigma = 0.0;
      if (cfg.model.tune) {
        SearchSpace space = cfg.model.space;
        TuneWeights weights = cfg.model.weights;
        if (cfg.model.method == Method::lssvm) {
          space.tune_sigma = false;
          weights = TuneWeights{1.0, 0.0};
        }
        CvOptions cv;
        cv.centering = cfg.interp.centering;
        const FoldPlan plan = kfold_split(ds.rows(), cfg.protocol.folds, cfg.protocol.fold_seed);
        const TuneResult t = tune_hyperparams(ds, p_raw, kernel, space, plan, weights, cv);
        kernel = t.kernel;
        hyper = t.hyper;
      }
      const auto [norm_ds, np] = normalize_minmax(ds);
      TrainedModel model =
          train_ilssvm(norm_ds.X, norm_ds.y, apply_target_norm(np, p_raw), kernel, hyper);
      model.norm = np;
      save_model(model, tr_output);
      std::printf("%s\n", tr_output.c_str());
    } else if (pr->parsed()) {
      const TrainedModel model = load_model(pr_model);
      const Dataset ds = read_csv(pr_input);
      const Vector f = predict_raw(model, ds.X);
      std::string out = "y_pred\n";
      for (Eigen::Index i = 0; i < f.size(); ++i) out += format_number(f(i)) + "\n";
      if (pr_output.empty()) {
        std::fputs(out.c_str(), stdout);
      } else {
        write_file(pr_output, out);
      }
      std::fprintf(stderr, "mse %s\n", format_number(mse(f, ds.y)).c_str());
    } else if (bm->parsed()) {
      if (!bm_sigma.empty()) {
        bm_ov.sets.push_back("model.sigma=" + bm_sigma);
        if (std::stod(bm_sigma) == 0.0) bm_ov.sets.push_back("model.sigma_range=-8:-8");
      }
      if (bm_no_timing) bm_ov.sets.push_back("output.timing=false");
      const ConfigFile file = bm_ov.file();
      const ExperimentConfig cfg = build_config(file);
      const fs::path dir = bm_dir.empty() ? cfg.output.dir : fs::path(bm_dir);
      std::vector<std::string> names;
      if (bm_all) {
        names = builtin_names();
      } else {
        names.push_back("");
      }
      std::vector<BenchmarkResult> results;
      for (const auto& name : names) {
        const ExperimentConfig c = name.empty() ? cfg : for_builtin(cfg, name);
        const Dataset ds = load_dataset(c.dataset);
        results.push_back(run_benchmark(ds, resolve_interp(c, ds), benchmark_options(c)));
      }
      write_file(dir / "benchmark.csv", benchmark_csv(results, cfg.hash));
      const std::string text = benchmark_text(results, cfg.hash);
      write_file(dir / "benchmark.txt", text);
      std::fputs(text.c_str(), stdout);
    } else if (bd->parsed()) {
      const ConfigFile file = bd_ov.file();
      const ExperimentConfig cfg = build_config(file);
      cfg.bounds.validate();
      std::vector<BoundRow> rows;
      if (bd_sweep.empty()) {
        rows.push_back(evaluate_bound(cfg.bounds));
      } else {
        if (bd_points < 2) throw InvalidArgument("--points must be at least 2");
        if (!(bd_from < bd_to)) throw InvalidArgument("--from must be below --to");
        for (int i = 0; i < bd_points; ++i) {
          const double t = static_cast<double>(i) / (bd_points - 1);
          BoundInputs in = cfg.bounds;
          if (bd_sweep == "m") {
            if (bd_from <= 0) throw InvalidArgument("m sweep needs --from > 0");
            in.m = bd_from * std::pow(bd_to / bd_from, t);
          } else {
            in.delta = bd_from + (bd_to - bd_from) * t;
          }
          in.validate();
          rows.push_back(evaluate_bound(in));
        }
      }
      const std::string csv = bounds_csv(rows, cfg.hash);
      if (bd_output.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        write_file(bd_output, csv);
      }
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    std::fprintf(stderr, "error: %s: %s\n", e.kind(), msg.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
