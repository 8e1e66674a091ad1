// Times the OpenMP kernels and fold loop against their serial references and
// checks the results agree bit for bit.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "ilssvm/experiment.hpp"
#include "ilssvm/kernel.hpp"
#include "ilssvm/rng.hpp"
#include "ilssvm/tuning.hpp"

using namespace ilssvm;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

Matrix random_matrix(Rng& rng, Eigen::Index n, Eigen::Index d) {
  Matrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
  return X;
}

}  // namespace

int main(int argc, char** argv) {
  const Eigen::Index n = argc > 1 ? std::atoi(argv[1]) : 1500;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("threads %d\n", omp_get_max_threads());
  bool ok = true;

  Rng rng(1);
  const Matrix X = random_matrix(rng, n, 8);
  const Matrix Z = random_matrix(rng, n / 2, 8);
  const KernelSpec k = KernelSpec::rbf(1.0);

  Eigen::MatrixXd a, b;
  const double t_gs = best_of(reps, [&] { a = gram_serial(k, X); });
  const double t_gp = best_of(reps, [&] { b = gram(k, X); });
  ok = ok && a == b;
  std::printf("gram        n=%-6ld serial %.4fs parallel %.4fs speedup %.2fx identical %s\n", static_cast<long>(n), t_gs,
              t_gp, t_gs / t_gp, a == b ? "yes" : "NO");

  const double t_cs = best_of(reps, [&] { a = cross_gram_serial(k, X, Z); });
  const double t_cp = best_of(reps, [&] { b = cross_gram(k, X, Z); });
  ok = ok && a == b;
  std::printf("cross_gram  n=%-6ld serial %.4fs parallel %.4fs speedup %.2fx identical %s\n", static_cast<long>(n), t_cs,
              t_cp, t_cs / t_cp, a == b ? "yes" : "NO");

  const Dataset ds = generate_dataset(builtin_spec("multi2"), 0);
  std::vector<expr::Expr> basis;
  for (const auto& t : default_basis("multi2")) basis.push_back(expr::parse_expr(t));
  const InterpModel interp = fit_interp(ds, basis, PsoParams{}).model;
  const FoldPlan plan = kfold_split(ds.rows(), 10, 0);
  CvOptions serial;
  serial.execution = Execution::serial;
  serial.record_time = false;
  CvOptions parallel = serial;
  parallel.execution = Execution::parallel;
  EvalReport rs, rp;
  const HyperParams h{10.0, 1.0};
  const double t_vs = best_of(reps, [&] { rs = cross_validate(ds, interp, k, h, plan, serial); });
  const double t_vp = best_of(reps, [&] { rp = cross_validate(ds, interp, k, h, plan, parallel); });
  const bool same = rs.mse.per_run == rp.mse.per_run && rs.r_id.per_run == rp.r_id.per_run;
  ok = ok && same;
  std::printf("cv 10-fold  n=%-6ld serial %.4fs parallel %.4fs speedup %.2fx identical %s\n",
              static_cast<long>(ds.rows()), t_vs, t_vp, t_vs / t_vp, same ? "yes" : "NO");
  return ok ? 0 : 1;
}
