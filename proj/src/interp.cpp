#include "ilssvm/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ilssvm/error.hpp"
#include "ilssvm/rng.hpp"

namespace ilssvm {

void InterpModel::validate(std::size_t dims) const {
  if (basis.empty()) throw InvalidArgument("interpretation model needs at least one basis term");
  if (static_cast<std::size_t>(mu.size()) != basis.size())
    throw InvalidArgument("interpretation model has " + std::to_string(basis.size()) + " basis terms but " +
                          std::to_string(mu.size()) + " coefficients");
  for (const auto& term : basis) {
    if (static_cast<std::size_t>(term.max_variable()) > dims)
      throw InvalidArgument("basis term '" + expr::to_string(term) + "' references x" +
                            std::to_string(term.max_variable()) + " but the data has " + std::to_string(dims) +
                            " attributes");
  }
}

InterpModel make_interp(const std::vector<std::string>& basis_text, std::vector<double> mu) {
  InterpModel m;
  for (const auto& t : basis_text) m.basis.push_back(expr::parse_expr(t));
  m.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  m.validate(static_cast<std::size_t>(std::numeric_limits<int>::max()));
  return m;
}

Eigen::MatrixXd basis_matrix(std::span<const expr::Expr> basis, const Matrix& X) {
  Eigen::MatrixXd B(X.rows(), static_cast<Eigen::Index>(basis.size()));
  const auto d = static_cast<std::size_t>(X.cols());
  for (Eigen::Index k = 0; k < X.rows(); ++k) {
    const std::span<const double> x(X.row(k).data(), d);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      try {
        B(k, static_cast<Eigen::Index>(j)) = basis[j](x);
      } catch (const EvalError& e) {
        throw EvalError("basis term '" + expr::to_string(basis[j]) + "' at row " + std::to_string(k) + ": " +
                        e.what());
      }
    }
  }
  return B;
}

Vector interp_predict(const InterpModel& model, const Matrix& X) {
  model.validate(static_cast<std::size_t>(X.cols()));
  return basis_matrix(model.basis, X) * model.mu;
}

namespace {

void check_pair(std::span<const double> f, std::span<const double> p, const char* what) {
  if (f.size() != p.size())
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(f.size()) + " vs " +
                          std::to_string(p.size()) + ")");
  if (f.empty()) throw InvalidArgument(std::string(what) + ": empty input");
}

}  // namespace

double mean_error(std::span<const double> f, std::span<const double> p) {
  check_pair(f, p, "mean_error");
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k] - p[k];
  return s / static_cast<double>(f.size());
}

double interpretation_distance(std::span<const double> f, std::span<const double> p, Centering centering) {
  check_pair(f, p, "interpretation_distance");
  double c = 0.0;
  if (centering == Centering::signed_mean) {
    c = mean_error(f, p);
  } else {
    for (std::size_t k = 0; k < f.size(); ++k) c += std::abs(f[k] - p[k]);
    c /= static_cast<double>(f.size());
  }
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double r = f[k] - p[k] - c;
    s += r * r;
  }
  return s / static_cast<double>(f.size());
}

void PsoParams::validate() const {
  if (swarm_size < 2) throw InvalidArgument("pso: swarm_size must be at least 2");
  if (iterations < 1) throw InvalidArgument("pso: iterations must be at least 1");
  if (!(low < high)) throw InvalidArgument("pso: position bounds need low < high");
}

PsoResult pso_fit_interp(const std::vector<expr::Expr>& basis, const Matrix& X, const Vector& target,
                         const PsoParams& params, Centering centering) {
  params.validate();
  if (X.rows() < 2) throw InvalidArgument("pso: need at least 2 samples");
  if (target.size() != X.rows()) throw InvalidArgument("pso: target length does not match sample count");
  InterpModel probe{basis, Vector::Zero(static_cast<Eigen::Index>(basis.size()))};
  probe.validate(static_cast<std::size_t>(X.cols()));

  const Eigen::MatrixXd B = basis_matrix(basis, X);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const auto swarm = static_cast<std::size_t>(params.swarm_size);
  const double vmax = params.high - params.low;

  auto fitness = [&](const Vector& mu) {
    const Vector pred = B * mu;
    const double v = interpretation_distance(target, pred, centering);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Rng rng(params.seed);
  std::vector<Vector> pos(swarm, Vector(dim)), vel(swarm, Vector(dim)), best_pos(swarm);
  std::vector<double> best_fit(swarm);
  for (std::size_t i = 0; i < swarm; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      pos[i](j) = rng.uniform(params.low, params.high);
      vel[i](j) = rng.uniform(-vmax, vmax);
    }
    best_pos[i] = pos[i];
    best_fit[i] = fitness(pos[i]);
  }
  std::size_t leader = static_cast<std::size_t>(
      std::min_element(best_fit.begin(), best_fit.end()) - best_fit.begin());
  Vector global_pos = best_pos[leader];
  double global_fit = best_fit[leader];

  std::vector<double> history{global_fit};
  for (int it = 1; it < params.iterations; ++it) {
    for (std::size_t i = 0; i < swarm; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        double v = params.inertia * vel[i](j) + params.cognitive * r1 * (best_pos[i](j) - pos[i](j)) +
                   params.social * r2 * (global_pos(j) - pos[i](j));
        v = std::clamp(v, -vmax, vmax);
        vel[i](j) = v;
        pos[i](j) = std::clamp(pos[i](j) + v, params.low, params.high);
      }
      const double f = fitness(pos[i]);
      if (f < best_fit[i]) {
        best_fit[i] = f;
        best_pos[i] = pos[i];
      }
    }
    // Synchronous update: the leader changes only between sweeps.
    for (std::size_t i = 0; i < swarm; ++i) {
      if (best_fit[i] < global_fit) {
        global_fit = best_fit[i];
        global_pos = best_pos[i];
      }
    }
    history.push_back(global_fit);
  }

  PsoResult result;
  result.model = InterpModel{basis, global_pos};
  result.fitness = global_fit;
  result.history = std::move(history);
  return result;
}

}  // namespace ilssvm
