#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ilssvm/data.hpp"
#include "ilssvm/error.hpp"
#include "ilssvm/experiment.hpp"
#include "ilssvm/tuning.hpp"
#include "test_util.hpp"

using namespace ilssvm;

namespace {

InterpModel spanning_plane() { return make_interp({"x1", "x2"}, {0.6, 0.3}); }

}  // namespace

TEST_CASE("kfold shapes") {
  const FoldPlan a = kfold_split(10, 10, 0);
  for (std::size_t f = 0; f < 10; ++f) CHECK(a.test_rows(f).size() == 1);
  const FoldPlan b = kfold_split(60, 10, 0);
  for (std::size_t f = 0; f < 10; ++f) {
    CHECK(b.test_rows(f).size() == 6);
    CHECK(b.train_rows(f).size() == 54);
  }
  CHECK(kfold_split(60, 10, 0).assignments == b.assignments);
  CHECK_FALSE(kfold_split(60, 10, 1).assignments == b.assignments);
  CHECK_THROWS_AS(kfold_split(5, 6, 0), InvalidArgument);
  CHECK_THROWS_AS(kfold_split(5, 1, 0), InvalidArgument);
}

TEST_CASE("kfold partition laws for 2 <= k <= n <= 200") {
  for (std::size_t n = 2; n <= 200; ++n) {
    for (std::size_t k = 2; k <= n; ++k) {
      const FoldPlan plan = kfold_split(n, k, n * 1000 + k);
      std::vector<std::size_t> sizes(k, 0);
      for (std::size_t a : plan.assignments) {
        REQUIRE(a < k);
        ++sizes[a];
      }
      const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      REQUIRE(*lo >= 1);
      REQUIRE(*hi - *lo <= 1);
    }
  }
  const FoldPlan plan = kfold_split(37, 5, 3);
  std::vector<std::size_t> all;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto t = plan.test_rows(f);
    const auto r = plan.train_rows(f);
    CHECK(t.size() + r.size() == 37);
    std::set<std::size_t> overlap;
    std::set_intersection(t.begin(), t.end(), r.begin(), r.end(), std::inserter(overlap, overlap.begin()));
    CHECK(overlap.empty());
    all.insert(all.end(), t.begin(), t.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(37);
  std::iota(expect.begin(), expect.end(), std::size_t{0});
  CHECK(all == expect);
}

TEST_CASE("cross-validation on a noiseless plane") {
  DatasetSpec spec = builtin_spec("plane1");
  spec.noise.clear();
  const Dataset ds = generate_dataset(spec, 0);
  const EvalReport r =
      cross_validate(ds, spanning_plane(), KernelSpec::rbf(1.0), {100.0, 10.0}, kfold_split(60, 10, 0));
  CHECK(r.r_mse.mean < 1e-2);
  CHECK(r.folds.size() == 10);
  CHECK(r.mse.per_run.size() == 10);
  CHECK(r.r_scc.mean > 0.99);
}

TEST_CASE("constant targets give identical fold models") {
  Rng rng(1);
  Dataset ds;
  ds.X = testutil::random_matrix(rng, 20, 2);
  ds.y = Vector::Constant(20, 1.5);
  ds.attr_names = {"x1", "x2"};
  CvOptions opt;
  opt.normalize = false;
  opt.reference_metrics = false;
  const EvalReport r = cross_validate(ds, Vector(Vector::Zero(20)), KernelSpec::rbf(1.0), {10.0, 0.0},
                                      kfold_split(20, 5, 0), opt);
  // Zero up to rounding in the solve.
  CHECK(r.mse.variance < 1e-40);
  CHECK(r.mse.mean < 1e-20);
  CHECK(std::isnan(r.folds[0].ppcc));
}

TEST_CASE("cross-validation requires clean targets for reference metrics") {
  Dataset ds = generate_dataset(builtin_spec("plane1"), 0);
  ds.y_clean.reset();
  CHECK_THROWS_AS(cross_validate(ds, spanning_plane(), KernelSpec::rbf(1.0), {1.0, 1.0}, kfold_split(60, 10, 0)),
                  DataError);
  CvOptions opt;
  opt.reference_metrics = false;
  CHECK_NOTHROW(cross_validate(ds, spanning_plane(), KernelSpec::rbf(1.0), {1.0, 1.0}, kfold_split(60, 10, 0), opt));
  CHECK_THROWS_AS(cross_validate(ds, spanning_plane(), KernelSpec::rbf(1.0), {1.0, 1.0}, kfold_split(50, 10, 0), opt),
                  InvalidArgument);
}

TEST_CASE("cross-validation is deterministic and serial equals parallel") {
  const Dataset ds = generate_dataset(builtin_spec("friedman2"), 4);
  const InterpModel interp = make_interp({"sin(pi*x1*x2)", "(x3-0.5)^2", "x4", "x5"}, {10, 20, 10, 5});
  const FoldPlan plan = kfold_split(60, 10, 7);
  CvOptions serial;
  serial.execution = Execution::serial;
  serial.record_time = false;
  CvOptions parallel = serial;
  parallel.execution = Execution::parallel;
  const EvalReport a = cross_validate(ds, interp, KernelSpec::rbf(0.9), {20.0, 2.0}, plan, serial);
  const EvalReport b = cross_validate(ds, interp, KernelSpec::rbf(0.9), {20.0, 2.0}, plan, parallel);
  const EvalReport c = cross_validate(ds, interp, KernelSpec::rbf(0.9), {20.0, 2.0}, plan, parallel);
  for (std::size_t f = 0; f < 10; ++f) {
    CHECK(a.folds[f].predictions == b.folds[f].predictions);
    CHECK(b.folds[f].predictions == c.folds[f].predictions);
  }
  CHECK(a.mse.per_run == b.mse.per_run);
  CHECK(a.r_id.per_run == c.r_id.per_run);
  CHECK(a.d_time.mean == 0.0);
}

TEST_CASE("no normalization leakage") {
  const Dataset ds = generate_dataset(builtin_spec("multi1"), 0);
  const InterpModel interp = make_interp({"x1*x2", "x1*x4", "x2*x5", "x3*x4*x5"}, {1.27, 1.56, 3.42, 2.06});
  const FoldPlan plan = kfold_split(60, 10, 0);
  CvOptions opt;
  opt.record_time = false;
  const EvalReport r = cross_validate(ds, interp, KernelSpec::rbf(1.0), {10.0, 1.0}, plan, opt);

  // Each fold's statistics are exactly those of its training rows.
  for (std::size_t f = 0; f < 10; ++f) {
    const NormParams expect = fit_norm(ds.subset(plan.train_rows(f)));
    CHECK(r.folds[f].norm.target.min == expect.target.min);
    CHECK(r.folds[f].norm.target.max == expect.target.max);
    for (std::size_t j = 0; j < ds.dims(); ++j) {
      CHECK(r.folds[f].norm.inputs[j].min == expect.inputs[j].min);
      CHECK(r.folds[f].norm.inputs[j].max == expect.inputs[j].max);
    }
  }

  // Swap test: exchanging which rows are held out in fold 0 and fold 1
  // changes fold 0's statistics whenever the extreme target moves between them.
  std::size_t argmax = 0;
  ds.y.maxCoeff(&argmax);
  FoldPlan swapped = plan;
  const std::size_t owner = plan.assignments[argmax];
  const std::size_t other = (owner + 1) % 10;
  for (auto& a : swapped.assignments) {
    if (a == owner) {
      a = other;
    } else if (a == other) {
      a = owner;
    }
  }
  const EvalReport s = cross_validate(ds, interp, KernelSpec::rbf(1.0), {10.0, 1.0}, swapped, opt);
  CHECK(r.folds[owner].norm.target.max != s.folds[owner].norm.target.max);
  CHECK(r.folds[owner].norm.target.max < ds.y.maxCoeff());
  CHECK(s.folds[owner].norm.target.max == ds.y.maxCoeff());

  // Changing held-out targets leaves that fold's predictions untouched.
  Dataset perturbed = ds;
  for (std::size_t row : plan.test_rows(3)) perturbed.y(static_cast<Eigen::Index>(row)) += 1000.0;
  const EvalReport q = cross_validate(perturbed, interp, KernelSpec::rbf(1.0), {10.0, 1.0}, plan, opt);
  CHECK(q.folds[3].norm.target.max == r.folds[3].norm.target.max);
  CHECK(invert_norm(q.folds[3].norm, q.folds[3].predictions) == invert_norm(r.folds[3].norm, r.folds[3].predictions));
}

TEST_CASE("nelder-mead") {
  SimplexParams p;
  p.max_iters = 2000;
  const SimplexResult q = nelder_mead([](const Vector& x) { return (x(0) - 2) * (x(0) - 2); }, Vector::Zero(1), p);
  CHECK(std::fabs(q.x(0) - 2.0) < 1e-4);

  Vector x0(2);
  x0 << -1.2, 1.0;
  const SimplexResult r = nelder_mead(
      [](const Vector& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); }, x0, p);
  CHECK(r.f < 1e-3);
  CHECK(r.iterations <= 2000);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);

  // A constant objective gives the constant and a vertex of the simplex;
  // shrink steps collapse the simplex so it stops on the diameter test.
  SimplexParams c;
  c.max_iters = 50;
  c.initial_step = 0.5;
  const SimplexResult k = nelder_mead([](const Vector&) { return 3.25; }, Vector::Zero(2), c);
  CHECK(k.f == 3.25);
  CHECK(k.iterations <= 50);
  CHECK(k.x.size() == 2);
  CHECK(k.x.cwiseAbs().maxCoeff() <= 0.5);

  // Non-finite values are penalized, not raised.
  const SimplexResult n = nelder_mead(
      [](const Vector& x) { return x(0) < 0 ? std::nan("") : (x(0) - 1) * (x(0) - 1); }, Vector::Constant(1, 0.1), p);
  CHECK(std::fabs(n.x(0) - 1.0) < 1e-3);

  SimplexParams bad;
  bad.expansion = 0.5;
  CHECK_THROWS_AS(nelder_mead([](const Vector&) { return 0.0; }, Vector::Zero(1), bad), InvalidArgument);
}

TEST_CASE("sigma encoding") {
  CHECK(decode_sigma(-8.0) == 0.0);
  CHECK(decode_sigma(-9.0) == 0.0);
  CHECK(decode_sigma(3.0) == 1000.0 - kSigmaEpsilon);
  CHECK(decode_sigma(0.0) == 1.0 - kSigmaEpsilon);
}

TEST_CASE("tuning") {
  const Dataset ds = generate_dataset(builtin_spec("plane1"), 0);
  const Vector p = interp_predict(spanning_plane(), ds.X);
  const FoldPlan plan = kfold_split(60, 10, 0);
  CvOptions opt;
  opt.reference_metrics = false;
  opt.record_time = false;

  SearchSpace ls;
  ls.tune_sigma = false;
  const TuneResult l = tune_hyperparams(ds, p, KernelSpec::rbf(1.0), ls, plan, {1.0, 0.0}, opt);
  CHECK(l.hyper.sigma == 0.0);
  // Pure MSE scalarization: the score is the CV MSE of the returned point.
  const EvalReport lr = cross_validate(ds, p, l.kernel, l.hyper, plan, opt);
  CHECK(std::fabs(l.score - lr.mse.mean) < 1e-12);

  const TuneResult i = tune_hyperparams(ds, p, KernelSpec::rbf(1.0), SearchSpace{}, plan, {1.0, 1.0}, opt);
  const EvalReport ir = cross_validate(ds, p, i.kernel, i.hyper, plan, opt);
  CHECK(ir.mse.mean <= 2.0 * lr.mse.mean);
  CHECK(i.kernel.width >= 1e-2);
  CHECK(i.kernel.width <= 1e2);
  CHECK(i.hyper.sigma <= 1e3);

  const TuneResult again = tune_hyperparams(ds, p, KernelSpec::rbf(1.0), SearchSpace{}, plan, {1.0, 1.0}, opt);
  CHECK(again.score == i.score);
  CHECK(again.hyper.phi == i.hyper.phi);

  SearchSpace one;
  one.grid_only = true;
  one.grid_points = 1;
  one.width = {0.0, 0.0};
  one.phi = {1.0, 1.0};
  one.sigma = {0.0, 0.0};
  const TuneResult g = tune_hyperparams(ds, p, KernelSpec::rbf(1.0), one, plan, {1.0, 1.0}, opt);
  CHECK(g.kernel.width == 1.0);
  CHECK(g.hyper.phi == 10.0);
  CHECK(g.hyper.sigma == 1.0 - kSigmaEpsilon);
  CHECK(g.evaluations == 1);

  SearchSpace centre;
  centre.grid_only = true;
  centre.grid_points = 1;
  centre.width = {-1.0, 1.0};
  centre.phi = {0.0, 2.0};
  centre.sigma = {-2.0, 0.0};
  const TuneResult gc = tune_hyperparams(ds, p, KernelSpec::rbf(1.0), centre, plan, {1.0, 1.0}, opt);
  CHECK(gc.kernel.width == 1.0);
  CHECK(gc.hyper.phi == 10.0);
  CHECK(gc.hyper.sigma == std::pow(10.0, -1.0) - kSigmaEpsilon);
  CHECK(g.evaluations == 1);

  SearchSpace empty;
  empty.phi = {2.0, 1.0};
  CHECK_THROWS_AS(tune_hyperparams(ds, p, KernelSpec::rbf(1.0), empty, plan, {1.0, 1.0}, opt), InvalidArgument);
}
