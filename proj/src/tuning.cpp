#include "ilssvm/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "ilssvm/error.hpp"
#include "ilssvm/rng.hpp"

namespace ilssvm {

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i)
    if (assignments[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i)
    if (assignments[i] != fold) rows.push_back(i);
  return rows;
}

FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("kfold_split: k must be at least 2");
  if (k > n)
    throw InvalidArgument("kfold_split: k = " + std::to_string(k) + " exceeds sample count " + std::to_string(n));
  FoldPlan plan{n, k, std::vector<std::size_t>(n), seed};
  Rng rng(seed);
  const auto order = rng.permutation(n);
  for (std::size_t pos = 0; pos < n; ++pos) plan.assignments[order[pos]] = pos % k;
  return plan;
}

namespace {

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double ppcc_or_nan(const Vector& a, const Vector& b) {
  try {
    return ppcc(view(a), view(b));
  } catch (const InvalidArgument&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

Vector take(const Vector& v, const std::vector<std::size_t>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
  return out;
}

FoldResult run_fold(const Dataset& ds, const Vector& interp_values, const KernelSpec& kernel,
                    const HyperParams& hyper, const FoldPlan& plan, std::size_t fold, const CvOptions& options) {
  const auto train_idx = plan.train_rows(fold);
  FoldResult r;
  r.test_rows = plan.test_rows(fold);

  Dataset train = ds.subset(train_idx);
  Dataset test = ds.subset(r.test_rows);
  Vector p_train = take(interp_values, train_idx);
  Vector p_test = take(interp_values, r.test_rows);
  if (options.normalize) {
    r.norm = fit_norm(train);
    train = apply_norm(r.norm, train);
    test = apply_norm(r.norm, test);
    p_train = apply_target_norm(r.norm, p_train);
    p_test = apply_target_norm(r.norm, p_test);
  }

  const auto start = std::chrono::steady_clock::now();
  const TrainedModel model = train_ilssvm(train.X, train.y, p_train, kernel, hyper);
  r.predictions = options.execution == Execution::parallel ? predict(model, test.X) : predict_serial(model, test.X);
  const auto stop = std::chrono::steady_clock::now();
  r.seconds = options.record_time ? std::chrono::duration<double>(stop - start).count() : 0.0;

  r.mse = mse(view(r.predictions), view(test.y));
  r.ppcc = ppcc_or_nan(r.predictions, test.y);
  r.r_id = interpretation_distance(r.predictions, p_test, options.centering);
  if (options.reference_metrics) {
    r.r_mse = mse(view(r.predictions), view(*test.y_clean));
    r.r_scc = ppcc_or_nan(r.predictions, *test.y_clean);
  } else {
    r.r_mse = r.r_scc = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

// Summary over the finite entries; undefined correlations are left out.
MetricSummary summarize_finite(const std::vector<double>& values) {
  std::vector<double> finite;
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return MetricSummary{nan, nan, nan, values};
  }
  MetricSummary s = summarize(finite);
  s.per_run = values;
  return s;
}

}  // namespace

EvalReport cross_validate(const Dataset& ds, const Vector& interp_values, const KernelSpec& kernel,
                          const HyperParams& hyper, const FoldPlan& plan, const CvOptions& options) {
  ds.validate();
  if (plan.n != ds.rows() || plan.assignments.size() != ds.rows())
    throw InvalidArgument("fold plan covers " + std::to_string(plan.n) + " samples, dataset has " +
                          std::to_string(ds.rows()));
  if (static_cast<std::size_t>(interp_values.size()) != ds.rows())
    throw InvalidArgument("interpretation values length does not match dataset");
  if (options.reference_metrics && !ds.y_clean)
    throw DataError("dataset '" + ds.name + "' has no y_clean column; R_MSE and R_SCC need noise-free targets");

  const std::size_t k = plan.k;
  std::vector<FoldResult> results(k);
  std::vector<std::exception_ptr> errors(k);
  const auto body = [&](std::size_t f) {
    try {
      results[f] = run_fold(ds, interp_values, kernel, hyper, plan, f, options);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  };
  if (options.execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t f = 0; f < k; ++f) body(f);
  } else {
    for (std::size_t f = 0; f < k; ++f) body(f);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  EvalReport report;
  report.folds = std::move(results);
  std::vector<double> mse_v, ppcc_v, rid_v, rmse_v, rscc_v, time_v;
  for (const auto& r : report.folds) {
    mse_v.push_back(r.mse);
    ppcc_v.push_back(r.ppcc);
    rid_v.push_back(r.r_id);
    rmse_v.push_back(r.r_mse);
    rscc_v.push_back(r.r_scc);
    time_v.push_back(r.seconds);
  }
  report.mse = summarize(mse_v);
  report.ppcc = summarize_finite(ppcc_v);
  report.r_id = summarize(rid_v);
  report.r_mse = summarize_finite(rmse_v);
  report.r_scc = summarize_finite(rscc_v);
  report.d_time = summarize(time_v);
  return report;
}

EvalReport cross_validate(const Dataset& ds, const InterpModel& interp, const KernelSpec& kernel,
                          const HyperParams& hyper, const FoldPlan& plan, const CvOptions& options) {
  return cross_validate(ds, interp_predict(interp, ds.X), kernel, hyper, plan, options);
}

void SimplexParams::validate() const {
  if (!(reflection > 0.0)) throw InvalidArgument("simplex: reflection must be positive");
  if (!(expansion > 1.0)) throw InvalidArgument("simplex: expansion must exceed 1");
  if (!(contraction > 0.0 && contraction < 1.0)) throw InvalidArgument("simplex: contraction must be in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("simplex: shrink must be in (0, 1)");
  if (max_iters < 1) throw InvalidArgument("simplex: max_iters must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("simplex: tol must be positive");
  if (!(initial_step > 0.0)) throw InvalidArgument("simplex: initial_step must be positive");
}

SimplexResult nelder_mead(const std::function<double(const Vector&)>& objective, const Vector& x0,
                          const SimplexParams& params) {
  params.validate();
  const Eigen::Index n = x0.size();
  if (n < 1) throw InvalidArgument("nelder_mead: empty starting point");
  const auto eval = [&](const Vector& x) {
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Vector> pts(static_cast<std::size_t>(n + 1), x0);
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += params.initial_step;
  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(pts.size());
  SimplexResult result;
  for (int it = 0;; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<Vector> sorted_pts;
    std::vector<double> sorted_vals;
    for (std::size_t i : order) {
      sorted_pts.push_back(pts[i]);
      sorted_vals.push_back(vals[i]);
    }
    pts = std::move(sorted_pts);
    vals = std::move(sorted_vals);
    result.history.push_back(vals.front());

    double diameter = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      diameter = std::max(diameter, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
    if (diameter < params.tol) {
      result.converged = true;
      result.iterations = it;
      break;
    }
    if (it >= params.max_iters) {
      result.iterations = it;
      break;
    }

    const std::size_t worst = pts.size() - 1;
    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Vector xr = centroid + params.reflection * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[0]) {
      const Vector xe = centroid + params.expansion * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (fr < vals[worst]) {
      const Vector xc = centroid + params.contraction * (xr - centroid);
      const double fc = eval(xc);
      if (fc <= fr) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
    } else {
      const Vector xcc = centroid + params.contraction * (pts[worst] - centroid);
      const double fcc = eval(xcc);
      if (fcc < vals[worst]) {
        pts[worst] = xcc;
        vals[worst] = fcc;
        continue;
      }
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
      pts[i] = pts[0] + params.shrink * (pts[i] - pts[0]);
      vals[i] = eval(pts[i]);
    }
  }
  result.x = pts.front();
  result.f = vals.front();
  return result;
}

void SearchSpace::validate() const {
  const auto check = [](const LogBox& b, const char* name) {
    if (!std::isfinite(b.low) || !std::isfinite(b.high) || b.low > b.high)
      throw InvalidArgument(std::string("empty search space for ") + name);
  };
  check(width, "width");
  check(phi, "phi");
  if (tune_sigma) check(sigma, "sigma");
  if (grid_points < 0) throw InvalidArgument("grid_points must be non-negative");
  if (grid_only && grid_points == 0) throw InvalidArgument("grid-only search needs at least one grid point");
  simplex.validate();
}

double decode_sigma(double log_value) {
  if (log_value <= std::log10(kSigmaEpsilon)) return 0.0;
  return std::pow(10.0, log_value) - kSigmaEpsilon;
}

namespace {

struct Axis {
  LogBox box;
  int which;  // 0 width, 1 phi, 2 sigma
};

}  // namespace

TuneResult tune_hyperparams(const Dataset& ds, const Vector& interp_values, const KernelSpec& kernel,
                            const SearchSpace& space, const FoldPlan& plan, const TuneWeights& weights,
                            CvOptions options) {
  space.validate();
  options.reference_metrics = false;
  options.record_time = false;

  std::vector<Axis> axes;
  double fixed[3] = {space.width.low, space.phi.low, space.sigma.low};
  const bool search_width = kernel.family == KernelFamily::rbf;
  if (search_width && space.width.low < space.width.high) axes.push_back({space.width, 0});
  if (space.phi.low < space.phi.high) axes.push_back({space.phi, 1});
  if (space.tune_sigma && space.sigma.low < space.sigma.high) axes.push_back({space.sigma, 2});

  const auto configure = [&](const Vector& x, KernelSpec& k, HyperParams& h) {
    double logs[3] = {fixed[0], fixed[1], fixed[2]};
    for (std::size_t a = 0; a < axes.size(); ++a)
      logs[axes[a].which] = std::clamp(x(static_cast<Eigen::Index>(a)), axes[a].box.low, axes[a].box.high);
    k = kernel;
    if (search_width) k.width = std::pow(10.0, logs[0]);
    h.phi = std::pow(10.0, logs[1]);
    h.sigma = space.tune_sigma ? decode_sigma(logs[2]) : 0.0;
  };

  int evaluations = 0;
  const auto score = [&](const Vector& x) {
    ++evaluations;
    KernelSpec k;
    HyperParams h;
    configure(x, k, h);
    try {
      const EvalReport rep = cross_validate(ds, interp_values, k, h, plan, options);
      const double s = weights.mse * rep.mse.mean + (weights.id != 0.0 ? weights.id * rep.r_id.mean : 0.0);
      return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
    } catch (const SolveError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const auto dim = static_cast<Eigen::Index>(axes.size());
  Vector start(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const auto& b = axes[static_cast<std::size_t>(a)].box;
    start(a) = 0.5 * (b.low + b.high);
  }
  double start_score = std::numeric_limits<double>::infinity();

  if (space.grid_points > 0 && dim > 0) {
    const int g = space.grid_points;
    std::vector<int> counter(static_cast<std::size_t>(dim), 0);
    for (;;) {
      Vector x(dim);
      for (Eigen::Index a = 0; a < dim; ++a) {
        const auto& b = axes[static_cast<std::size_t>(a)].box;
        const int c = counter[static_cast<std::size_t>(a)];
        x(a) = g == 1 ? 0.5 * (b.low + b.high) : b.low + (b.high - b.low) * c / (g - 1);
      }
      const double s = score(x);
      if (s < start_score) {
        start_score = s;
        start = x;
      }
      Eigen::Index a = 0;
      while (a < dim && ++counter[static_cast<std::size_t>(a)] == g) counter[static_cast<std::size_t>(a++)] = 0;
      if (a == dim) break;
    }
  }

  Vector best = start;
  double best_score = start_score;
  if (dim == 0) {
    best_score = score(best);
  } else if (!space.grid_only) {
    const SimplexResult nm = nelder_mead(score, start, space.simplex);
    Vector clamped = nm.x;
    for (Eigen::Index a = 0; a < dim; ++a) {
      const auto& b = axes[static_cast<std::size_t>(a)].box;
      clamped(a) = std::clamp(clamped(a), b.low, b.high);
    }
    if (nm.f <= best_score) {
      best = clamped;
      best_score = nm.f;
    }
  } else if (space.grid_points == 0) {
    best_score = score(best);
  }

  TuneResult result;
  configure(best, result.kernel, result.hyper);
  result.score = best_score;
  result.evaluations = evaluations;
  return result;
}

}  // namespace ilssvm
