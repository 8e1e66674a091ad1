// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "ilssvm/bounds.hpp"
#include "ilssvm/data.hpp"
#include "ilssvm/experiment.hpp"
#include "ilssvm/interp.hpp"
#include "ilssvm/kernel.hpp"
#include "ilssvm/metrics.hpp"
#include "ilssvm/svm.hpp"
#include "ilssvm/tuning.hpp"
#include "test_util.hpp"

using namespace ilssvm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::vector<expr::Expr> parse_all(const std::vector<std::string>& text) {
  std::vector<expr::Expr> out;
  for (const auto& t : text) out.push_back(expr::parse_expr(t));
  return out;
}

InterpModel default_interp(const Dataset& ds, const std::string& name, std::uint64_t seed) {
  PsoParams pso;
  pso.seed = seed;
  return fit_interp(ds, parse_all(default_basis(name)), pso).model;
}

// LSSVM through a generic LU solve of the bordered system.
Vector lssvm_lu(const Matrix& X, const Vector& y, const KernelSpec& k, double phi, const Matrix& Xq) {
  const auto n = X.rows();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  A.topLeftCorner(n, n) = gram_serial(k, X) + Eigen::MatrixXd::Identity(n, n) / phi;
  A.topRightCorner(n, 1).setOnes();
  A.bottomLeftCorner(1, n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = y;
  const Vector sol = A.fullPivLu().solve(rhs);
  return cross_gram_serial(k, Xq, X) * sol.head(n) + Vector::Constant(Xq.rows(), sol(n));
}

Outcome c1_sigma_zero() {
  Outcome o;
  double worst = 0.0;
  const KernelSpec k = KernelSpec::rbf(1.0);
  const double phi = 10.0;
  for (const auto& name : builtin_names()) {
    const Dataset ds = generate_dataset(builtin_spec(name), 0);
    const Vector p = interp_predict(default_interp(ds, name, 0), ds.X);
    const FoldPlan plan = kfold_split(ds.rows(), 10, 0);
    for (std::size_t f = 0; f < plan.k; ++f) {
      const Dataset train = ds.subset(plan.train_rows(f));
      const Dataset test = ds.subset(plan.test_rows(f));
      const NormParams np = fit_norm(train);
      const Dataset tr = apply_norm(np, train);
      const Matrix Xt = apply_input_norm(np, test.X);
      Vector ptr(static_cast<Eigen::Index>(train.rows()));
      const auto rows = plan.train_rows(f);
      for (std::size_t i = 0; i < rows.size(); ++i) ptr(static_cast<Eigen::Index>(i)) = p(static_cast<Eigen::Index>(rows[i]));
      const Vector fi = predict(train_ilssvm(tr.X, tr.y, apply_target_norm(np, ptr), k, {phi, 0.0}), Xt);
      const Vector fl = predict(train_lssvm(tr.X, tr.y, k, phi), Xt);
      const Vector fu = lssvm_lu(tr.X, tr.y, k, phi, Xt);
      worst = std::max({worst, (fi - fl).cwiseAbs().maxCoeff(), (fi - fu).cwiseAbs().maxCoeff()});
    }
  }
  o.pass = worst < 1e-8;
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |ILSSVM(sigma=0) - LSSVM| over 8 datasets x 10 test folds = %.3e (limit 1e-8)", worst);
  o.detail = buf;
  return o;
}

Outcome c2_primal_oracle() {
  Outcome o;
  Rng rng(2026);
  double worst_obj = 0.0, worst_res = 0.0;
  for (Eigen::Index n : {4, 6, 10}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto d = static_cast<Eigen::Index>(1 + rng.below(4));
      const Matrix X = testutil::random_matrix(rng, n, d);
      const Vector y = testutil::random_vector(rng, n), p = testutil::random_vector(rng, n);
      const double phi = std::pow(10.0, rng.uniform(-1, 2)), sigma = std::pow(10.0, rng.uniform(-1, 2));
      const TrainedModel m = train_ilssvm(X, y, p, KernelSpec::linear(), {phi, sigma});

      // Oracle: stationarity of the primal in (w, b) after eliminating the slacks.
      const Eigen::MatrixXd Xd = X;
      const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
      const Vector ones = Vector::Ones(n);
      Eigen::MatrixXd A(d + 1, d + 1);
      Vector r(d + 1);
      A.topLeftCorner(d, d) = Eigen::MatrixXd::Identity(d, d) + phi * Xd.transpose() * Xd + sigma * Xd.transpose() * H * Xd;
      A.topRightCorner(d, 1) = phi * Xd.transpose() * ones;
      A.bottomLeftCorner(1, d) = phi * ones.transpose() * Xd;
      A(d, d) = phi * static_cast<double>(n);
      r.head(d) = phi * Xd.transpose() * y + sigma * Xd.transpose() * H * p;
      r(d) = phi * y.sum();
      const Vector sol = A.fullPivLu().solve(r);
      const Vector f = Xd * sol.head(d) + Vector::Constant(n, sol(d));
      const double oracle = 0.5 * sol.head(d).squaredNorm() + 0.5 * phi * (y - f).squaredNorm() +
                            0.5 * sigma * (H * (f - p)).squaredNorm();
      const double obj = primal_objective(m, X, y, p);
      worst_obj = std::max(worst_obj, std::fabs(obj - oracle) / std::max(1.0, std::fabs(oracle)));

      // Residual of the assembled dual system at the returned multipliers.
      const KktSystem kkt = assemble_kkt(gram_serial(KernelSpec::linear(), X), p, y, {phi, sigma});
      Vector z(2 * n + 1);
      z << m.alpha, m.beta, m.b;
      worst_res = std::max(worst_res, (kkt.A * z - kkt.rhs).cwiseAbs().maxCoeff() / kkt.rhs.cwiseAbs().maxCoeff());
    }
  }
  o.pass = worst_obj < 1e-8 && worst_res < 1e-10;
  char buf[200];
  std::snprintf(buf, sizeof buf, "60 instances: max rel objective gap %.3e (limit 1e-8), max KKT residual %.3e (limit 1e-10)",
                worst_obj, worst_res);
  o.detail = buf;
  return o;
}

Outcome c3_id_axioms() {
  Outcome o;
  Rng rng(3);
  double worst = 0.0;
  double min_id = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(60));
    const Vector f = testutil::random_vector(rng, n, -5, 5), p = testutil::random_vector(rng, n, -5, 5);
    const double c = rng.uniform(-50, 50), a = rng.uniform(-4, 4);
    const double id = interpretation_distance(f, p);
    const double me = mean_error(testutil::span(f), testutil::span(p));
    min_id = std::min(min_id, id);
    worst = std::max({worst, std::fabs(interpretation_distance(f, Vector(f.array() + c))),
                      std::fabs(interpretation_distance(Vector(f.array() + c), p) - id),
                      std::fabs(interpretation_distance(Vector(a * f), Vector(a * p)) - a * a * id),
                      std::fabs(id - (mse(f, p) - me * me))});
  }
  o.pass = min_id >= 0.0 && worst < 1e-10;
  char buf[160];
  std::snprintf(buf, sizeof buf, "1000 random vectors: min ID %.3e (>= 0), max axiom violation %.3e (limit 1e-10)", min_id,
                worst);
  o.detail = buf;
  return o;
}

Outcome c4_tradeoff() {
  Outcome o;
  const double sigmas[] = {0.0, 0.1, 1.0, 10.0, 100.0};
  const KernelSpec k = KernelSpec::rbf(1.0);
  const double phi = 10.0;
  int violations = 0, checked = 0, train_violations = 0;
  double worst = 0.0;
  std::string where;
  for (const auto& name : builtin_names()) {
    const Dataset ds = generate_dataset(builtin_spec(name), 0);
    const Vector p = interp_predict(default_interp(ds, name, 0), ds.X);
    const FoldPlan plan = kfold_split(ds.rows(), 10, 0);
    std::vector<std::vector<double>> ids(plan.k);
    // Training-split counterpart, reported for context only.
    for (std::size_t f = 0; f < plan.k; ++f) {
      const auto rows = plan.train_rows(f);
      const Dataset train = ds.subset(rows);
      const NormParams np = fit_norm(train);
      const Dataset tr = apply_norm(np, train);
      Vector ptr(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) ptr(static_cast<Eigen::Index>(i)) = p(static_cast<Eigen::Index>(rows[i]));
      const Vector pn = apply_target_norm(np, ptr);
      double prev = INFINITY;
      for (double s : sigmas) {
        const double id = interpretation_distance(predict(train_ilssvm(tr.X, tr.y, pn, k, {phi, s}), tr.X), pn);
        if (id > prev + 1e-10) ++train_violations;
        prev = id;
      }
    }
    for (double s : sigmas) {
      CvOptions opt;
      opt.record_time = false;
      const EvalReport r = cross_validate(ds, p, k, {phi, s}, plan, opt);
      for (std::size_t f = 0; f < plan.k; ++f) ids[f].push_back(r.folds[f].r_id);
    }
    for (std::size_t f = 0; f < plan.k; ++f) {
      for (std::size_t i = 1; i < ids[f].size(); ++i) {
        ++checked;
        const double rise = ids[f][i] - ids[f][i - 1];
        if (rise > 1e-10) {
          ++violations;
          if (rise > worst) {
            worst = rise;
            where = name + " fold " + std::to_string(f) + " sigma " + std::to_string(sigmas[i - 1]) + "->" +
                    std::to_string(sigmas[i]);
          }
        }
      }
    }
  }
  o.pass = violations == 0;
  char buf[300];
  std::snprintf(buf, sizeof buf, "%d/%d sigma steps raise the test-fold ID by more than 1e-10 (rbf width 1, phi 10)%s%s",
                violations, checked, violations ? "; worst rise at " : "", where.c_str());
  o.detail = buf;
  if (violations) {
    char w[64];
    std::snprintf(w, sizeof w, " = %.3e", worst);
    o.detail += w;
  }
  o.detail += "; training-split ID violations: " + std::to_string(train_violations) + "/" + std::to_string(checked);
  return o;
}

Outcome c5_directional() {
  Outcome o;
  int id_wins = 0, mse_wins = 0;
  std::string table;
  for (const auto& name : builtin_names()) {
    double rid[2] = {0, 0}, rmse[2] = {0, 0};
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Dataset ds = generate_dataset(builtin_spec(name), seed);
      BenchmarkOptions opt;
      opt.model.tune = true;
      opt.fold_seed = seed;
      opt.timing = false;
      const BenchmarkResult r = run_benchmark(ds, default_interp(ds, name, seed), opt);
      for (int m = 0; m < 2; ++m) {
        rid[m] += r.methods[static_cast<std::size_t>(m)].report.r_id.mean / 3.0;
        rmse[m] += r.methods[static_cast<std::size_t>(m)].report.r_mse.mean / 3.0;
      }
    }
    if (rid[1] < rid[0]) ++id_wins;
    if (rmse[1] < rmse[0]) ++mse_wins;
    char buf[200];
    std::snprintf(buf, sizeof buf, "\n      %-9s R_ID LSSVM %.4g ILSSVM %.4g | R_MSE LSSVM %.4g ILSSVM %.4g", name.c_str(), rid[0],
                  rid[1], rmse[0], rmse[1]);
    table += buf;
  }
  o.pass = id_wins >= 6 && mse_wins >= 6;
  o.detail = "ILSSVM lower R_ID on " + std::to_string(id_wins) + "/8, lower R_MSE on " + std::to_string(mse_wins) +
             "/8 (need 6/8 each)" + table;
  return o;
}

Outcome c6_interp_fit() {
  Outcome o;
  double worst = 0.0;
  std::string table;
  for (const auto& name : builtin_names()) {
    const Dataset ds = generate_dataset(builtin_spec(name), 0);
    const InterpFitRow row = run_interp_fit(ds, parse_all(default_basis(name)), PsoParams{}, 10);
    worst = std::max(worst, row.average);
    char buf[80];
    std::snprintf(buf, sizeof buf, " %s=%.3g", name.c_str(), row.average);
    table += buf;
  }
  o.pass = worst <= 0.3;
  char buf[80];
  std::snprintf(buf, sizeof buf, "max average ID over 10 PSO runs = %.3e (limit 0.3);", worst);
  o.detail = buf + table;
  return o;
}

Outcome c7_bounds() {
  Outcome o;
  double worst_res = 0.0, worst_exact = 0.0;
  bool theta_dec = true, eps_dec = true;
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const double c0 = std::pow(10.0, rng.uniform(-2, 6)), c1 = std::pow(10.0, rng.uniform(-3, 2));
    const double c2 = std::pow(10.0, rng.uniform(-2, 2)), d = rng.uniform(0.1, 1.9);
    const double t = solve_theta_star(c0, c1, c2, d);
    worst_res = std::max(worst_res, std::fabs(c0 * t + c1 - c2 * std::pow(t, -d)) / std::max(1.0, c0 * t + c1));
  }
  for (double ell : {0.6, 1.0, 2.5}) {
    BoundInputs in;
    in.ell_E = ell;
    in.M = 1.0;
    in.M_P = 0.4;
    double prev_t = INFINITY, prev_e = INFINITY;
    for (int e = 2; e <= 6; ++e) {
      for (int s = 1; s <= 9; ++s) {
        if (e == 6 && s > 1) break;
        in.m = s * std::pow(10.0, e);
        const BoundRow r = evaluate_bound(in);
        const ThetaCoefficients c = theta_coefficients(in);
        worst_res = std::max(worst_res, std::fabs(c.c0 * r.theta_star + c.c1 - c.c2 * std::pow(r.theta_star, -c.d)) /
                                            std::max(1.0, c.c0 * r.theta_star + c.c1));
        theta_dec = theta_dec && r.theta_star < prev_t;
        eps_dec = eps_dec && r.sample_error < prev_e;
        prev_t = r.theta_star;
        prev_e = r.sample_error;
      }
    }
  }
  for (double c : {1e-3, 0.5, 1.0, 3.0, 1e4}) worst_exact = std::max(worst_exact, std::fabs(solve_theta_star(c, 0, c, 1) - 1.0));
  o.pass = worst_res < 1e-10 && theta_dec && eps_dec && worst_exact <= 1e-12;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "max root residual %.3e (limit 1e-10); theta* strictly decreasing in m: %s; epsilon strictly decreasing: %s; "
                "|theta*(c0=c2, c1=0, d=1) - 1| = %.3e (limit 1e-12)",
                worst_res, theta_dec ? "yes" : "no", eps_dec ? "yes" : "no", worst_exact);
  o.detail = buf;
  return o;
}

Outcome c8_hygiene() {
  Outcome o;
  const auto dir = testutil::scratch_dir("acceptance_c8");
  testutil::spit(dir / "exp.ini",
                 "[dataset]\nbuiltin = friedman2\nseed = 5\n\n[model]\ntune = true\n\n[protocol]\nfold_seed = 2\n"
                 "repeat = 3\n\n[output]\ntiming = false\n");
  const std::string cli = std::string("'") + ILSSVM_CLI_PATH + "'";
  const std::string cfg = " --config '" + (dir / "exp.ini").string() + "'";
  bool identical = true;
  std::string files;
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("run" + std::to_string(run));
    const std::string o = " -o '" + out.string() + "'";
    const auto a = testutil::run(cli + " benchmark" + cfg + o, dir);
    const auto b = testutil::run(cli + " fit-interp" + cfg + o, dir);
    const auto c = testutil::run(cli + " generate" + cfg + " -o '" + (out / "data.csv").string() + "'", dir);
    identical = identical && a.status == 0 && b.status == 0 && c.status == 0;
  }
  for (const char* f : {"benchmark.csv", "benchmark.txt", "interp_fit.csv", "friedman2.interp", "data.csv", "data.csv.meta"}) {
    const std::string x = testutil::slurp(dir / "run0" / f), y = testutil::slurp(dir / "run1" / f);
    identical = identical && !x.empty() && x == y;
  }

  // Leakage: per-fold statistics come from the training rows alone.
  const Dataset ds = generate_dataset(builtin_spec("multi1"), 0);
  const Vector p = interp_predict(default_interp(ds, "multi1", 0), ds.X);
  const FoldPlan plan = kfold_split(60, 10, 0);
  CvOptions opt;
  opt.record_time = false;
  const EvalReport r = cross_validate(ds, p, KernelSpec::rbf(1.0), {10.0, 1.0}, plan, opt);
  bool train_only = true;
  for (std::size_t f = 0; f < plan.k; ++f) {
    const NormParams e = fit_norm(ds.subset(plan.train_rows(f)));
    train_only = train_only && r.folds[f].norm.target.min == e.target.min && r.folds[f].norm.target.max == e.target.max;
    for (std::size_t j = 0; j < ds.dims(); ++j)
      train_only = train_only && r.folds[f].norm.inputs[j].min == e.inputs[j].min &&
                   r.folds[f].norm.inputs[j].max == e.inputs[j].max;
  }
  // Swap the roles of the fold holding the largest target and its neighbour.
  Eigen::Index argmax = 0;
  ds.y.maxCoeff(&argmax);
  const std::size_t owner = plan.assignments[static_cast<std::size_t>(argmax)], other = (owner + 1) % plan.k;
  FoldPlan swapped = plan;
  for (auto& a : swapped.assignments) a = a == owner ? other : a == other ? owner : a;
  const EvalReport s = cross_validate(ds, p, KernelSpec::rbf(1.0), {10.0, 1.0}, swapped, opt);
  const bool swap_changes = s.folds[owner].norm.target.max != r.folds[owner].norm.target.max &&
                            r.folds[owner].norm.target.max < ds.y.maxCoeff();
  // Held-out targets never reach the fold's model.
  Dataset perturbed = ds;
  for (std::size_t row : plan.test_rows(4)) perturbed.y(static_cast<Eigen::Index>(row)) *= -50.0;
  const EvalReport q = cross_validate(perturbed, p, KernelSpec::rbf(1.0), {10.0, 1.0}, plan, opt);
  const bool blind = invert_norm(q.folds[4].norm, q.folds[4].predictions) == invert_norm(r.folds[4].norm, r.folds[4].predictions);

  o.pass = identical && train_only && swap_changes && blind;
  o.detail = std::string("repeated CLI runs byte-identical: ") + (identical ? "yes" : "no") +
             "; fold statistics from training rows only: " + (train_only ? "yes" : "no") +
             "; swap test changes fold statistics: " + (swap_changes ? "yes" : "no") +
             "; held-out targets leave predictions unchanged: " + (blind ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"C1", "sigma=0 reduction", c1_sigma_zero},
      {"C2", "primal-oracle equivalence", c2_primal_oracle},
      {"C3", "interpretation-distance axioms", c3_id_axioms},
      {"C4", "trade-off monotonicity", c4_tradeoff},
      {"C5", "directional benchmark reproduction", c5_directional},
      {"C6", "interpretation-fit band", c6_interp_fit},
      {"C7", "bound calculator", c7_bounds},
      {"C8", "protocol hygiene", c8_hygiene},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s [%s] (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
