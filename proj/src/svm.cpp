#include "ilssvm/svm.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Cholesky>

#include "ilssvm/error.hpp"

namespace ilssvm {

void HyperParams::validate() const {
  if (!(phi > 0.0) || !std::isfinite(phi)) throw InvalidArgument("phi must be positive and finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be non-negative and finite");
}

KktSystem assemble_kkt(const Eigen::MatrixXd& G, const Vector& p, const Vector& y, const HyperParams& hyper) {
  hyper.validate();
  const Eigen::Index n = G.rows();
  if (G.cols() != n || y.size() != n) throw InvalidArgument("assemble_kkt: dimension mismatch");
  KktSystem sys;

  if (hyper.sigma == 0.0) {
    sys.A.setZero(n + 1, n + 1);
    sys.A.topLeftCorner(n, n) = G;
    sys.A.topLeftCorner(n, n).diagonal().array() += 1.0 / hyper.phi;
    sys.A.block(0, n, n, 1).setOnes();
    sys.A.block(n, 0, 1, n).setOnes();
    sys.rhs.setZero(n + 1);
    sys.rhs.head(n) = y;
    return sys;
  }
  if (p.size() != n) throw InvalidArgument("assemble_kkt: interpretation values have wrong length");

  // Row means of G; G is symmetric so these are also the column means.
  const Vector r = G.rowwise().mean();
  const double g = r.mean();
  const Eigen::Index m = 2 * n + 1;
  sys.A.setZero(m, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      sys.A(i, j) = G(i, j);
      // (G H)(i, j) = G(i, j) - r_i and (H G)(j, i) = G(j, i) - r_i.
      sys.A(i, n + j) = G(i, j) - r(i);
      sys.A(n + j, i) = G(j, i) - r(i);
      // (H G H)(i, j) = G(i, j) - (r_i + r_j) + g; the sum commutes exactly.
      sys.A(n + i, n + j) = G(i, j) - (r(i) + r(j)) + g;
    }
    sys.A(i, i) += 1.0 / hyper.phi;
    sys.A(n + i, n + i) += 1.0 / hyper.sigma;
    sys.A(i, 2 * n) = 1.0;
    sys.A(2 * n, i) = 1.0;
  }
  sys.rhs.setZero(m);
  sys.rhs.head(n) = y;
  sys.rhs.segment(n, n) = p.array() - p.mean();
  return sys;
}

namespace {

double relative_residual(const KktSystem& sys, const Vector& sol) {
  const double scale = sys.rhs.lpNorm<Eigen::Infinity>();
  const double res = (sys.A * sol - sys.rhs).lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? res / scale : res;
}

// Solves [M c; c^T 0][u; b] = [r; s] with M SPD and c the bias column.
Vector solve_bordered(const Eigen::LLT<Eigen::MatrixXd>& llt, const Vector& c, const Vector& c_solved,
                      const Vector& rhs) {
  const Eigen::Index n = c.size();
  const Vector u1 = llt.solve(rhs.head(n));
  const double b = (c.dot(u1) - rhs(n)) / c.dot(c_solved);
  Vector sol(n + 1);
  sol.head(n) = u1 - b * c_solved;
  sol(n) = b;
  return sol;
}

TrainedModel solve_system(const Matrix& X, const Eigen::MatrixXd& G, const Vector& p, const Vector& y,
                          const KernelSpec& kernel, const HyperParams& hyper) {
  const KktSystem sys = assemble_kkt(G, p, y, hyper);
  const Eigen::Index n = X.rows();
  const Eigen::Index block = sys.A.rows() - 1;

  Eigen::LLT<Eigen::MatrixXd> llt(sys.A.topLeftCorner(block, block));
  if (llt.info() != Eigen::Success)
    throw SolveError("KKT system is not uniquely solvable (leading block not positive definite); "
                     "increase 1/phi or change the kernel");
  const double rcond = llt.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "KKT system is ill-conditioned (condition estimate " << cond << " > 1e12); "
        << "reduce phi or sigma, or change the kernel width";
    throw SolveError(msg.str());
  }

  Vector border = Vector::Zero(block);
  border.head(n).setOnes();
  const Vector border_solved = llt.solve(border);
  Vector sol = solve_bordered(llt, border, border_solved, sys.rhs);
  double residual = relative_residual(sys, sol);
  if (residual > 1e-10) {
    sol += solve_bordered(llt, border, border_solved, sys.rhs - sys.A * sol);
    residual = relative_residual(sys, sol);
  }

  TrainedModel model;
  model.kernel = kernel;
  model.X_train = X;
  model.alpha = sol.head(n);
  model.beta = hyper.sigma == 0.0 ? Vector::Zero(n) : Vector(sol.segment(n, n));
  model.b = sol(block);
  model.hyper = hyper;
  model.kkt_residual = residual;
  model.condition_estimate = cond;
  return model;
}

}  // namespace

TrainedModel train_ilssvm(const Matrix& X, const Vector& y, const Vector& interp_values, const KernelSpec& kernel,
                          const HyperParams& hyper) {
  hyper.validate();
  kernel.validate();
  if (X.rows() < 2) throw InvalidArgument("training needs at least 2 samples");
  if (y.size() != X.rows()) throw InvalidArgument("target length does not match sample count");
  if (hyper.sigma > 0.0 && interp_values.size() != X.rows())
    throw InvalidArgument("interpretation values length does not match sample count");
  return solve_system(X, gram(kernel, X), interp_values, y, kernel, hyper);
}

TrainedModel train_ilssvm(const Matrix& X, const Vector& y, const InterpModel& interp, const KernelSpec& kernel,
                          const HyperParams& hyper) {
  return train_ilssvm(X, y, interp_predict(interp, X), kernel, hyper);
}

TrainedModel train_lssvm(const Matrix& X, const Vector& y, const KernelSpec& kernel, double phi) {
  return train_ilssvm(X, y, Vector(), kernel, HyperParams{phi, 0.0});
}

namespace {

Vector evaluate(const TrainedModel& model, const Eigen::MatrixXd& K) {
  const double beta_sum = model.beta.sum();
  Vector f = K * (model.alpha + model.beta);
  if (beta_sum != 0.0) f -= K.rowwise().mean() * beta_sum;
  f.array() += model.b;
  return f;
}

void check_columns(const TrainedModel& model, const Matrix& X_new) {
  if (X_new.cols() != model.X_train.cols())
    throw InvalidArgument("predict: model expects " + std::to_string(model.X_train.cols()) + " columns, got " +
                          std::to_string(X_new.cols()));
}

}  // namespace

Vector predict(const TrainedModel& model, const Matrix& X_new) {
  check_columns(model, X_new);
  return evaluate(model, cross_gram(model.kernel, X_new, model.X_train));
}

Vector predict_serial(const TrainedModel& model, const Matrix& X_new) {
  check_columns(model, X_new);
  return evaluate(model, cross_gram_serial(model.kernel, X_new, model.X_train));
}

Vector predict_raw(const TrainedModel& model, const Matrix& X_raw) {
  if (!model.norm) return predict(model, X_raw);
  return invert_norm(*model.norm, predict(model, apply_input_norm(*model.norm, X_raw)));
}

double primal_objective(const TrainedModel& model, const Matrix& X, const Vector& y, const Vector& p) {
  const Eigen::MatrixXd G = gram(model.kernel, model.X_train);
  const Vector gamma = model.alpha + (model.beta.array() - model.beta.mean()).matrix();
  const double w_sq = gamma.dot(G * gamma);
  const Vector f = predict(model, X);
  const Vector e = y - f;
  double objective = 0.5 * w_sq + 0.5 * model.hyper.phi * e.squaredNorm();
  if (model.hyper.sigma > 0.0) {
    const Vector resid = f - p;
    const Vector tau = -(resid.array() - resid.mean()).matrix();
    objective += 0.5 * model.hyper.sigma * tau.squaredNorm();
  }
  return objective;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  os.write(buf, res.ptr - buf);
}

double get_number(std::istringstream& is, const char* field) {
  std::string token;
  if (!(is >> token)) throw DataError(std::string("model file: missing value for ") + field);
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw DataError(std::string("model file: bad number '") + token + "' for " + field);
  return v;
}

std::istringstream expect_line(std::istream& in, const std::string& key) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word != key) throw DataError("model file: expected '" + key + "', found '" + word + "'");
    return ls;
  }
  throw DataError("model file: unexpected end of file, expected '" + key + "'");
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  std::ostringstream os;
  os << "ilssvm-model 1\n";
  os << "kernel " << to_string(model.kernel) << '\n';
  os << "phi ";
  put(os, model.hyper.phi);
  os << "\nsigma ";
  put(os, model.hyper.sigma);
  os << "\nb ";
  put(os, model.b);
  os << "\nsamples " << model.X_train.rows() << "\ndims " << model.X_train.cols() << '\n';
  os << "normalized " << (model.norm ? 1 : 0) << '\n';
  if (model.norm) {
    os << "norm_target ";
    put(os, model.norm->target.min);
    os << ' ';
    put(os, model.norm->target.max);
    os << '\n';
    for (const auto& c : model.norm->inputs) {
      os << "norm_input ";
      put(os, c.min);
      os << ' ';
      put(os, c.max);
      os << '\n';
    }
  }
  os << "# x_1 ... x_d alpha beta\n";
  for (Eigen::Index i = 0; i < model.X_train.rows(); ++i) {
    os << "row";
    for (Eigen::Index j = 0; j < model.X_train.cols(); ++j) {
      os << ' ';
      put(os, model.X_train(i, j));
    }
    os << ' ';
    put(os, model.alpha(i));
    os << ' ';
    put(os, model.beta(i));
    os << '\n';
  }
  return os.str();
}

TrainedModel deserialize_model(const std::string& text) {
  std::istringstream in(text);
  TrainedModel m;
  {
    auto ls = expect_line(in, "ilssvm-model");
    int version = 0;
    ls >> version;
    if (version != 1) throw DataError("model file: unsupported version");
  }
  {
    auto ls = expect_line(in, "kernel");
    std::string family;
    ls >> family;
    m.kernel.family = parse_kernel_family(family);
    if (m.kernel.family == KernelFamily::rbf) m.kernel.width = get_number(ls, "rbf width");
    if (m.kernel.family == KernelFamily::polynomial) {
      m.kernel.degree = static_cast<int>(get_number(ls, "degree"));
      m.kernel.offset = get_number(ls, "offset");
    }
    m.kernel.validate();
  }
  {
    auto ls = expect_line(in, "phi");
    m.hyper.phi = get_number(ls, "phi");
  }
  {
    auto ls = expect_line(in, "sigma");
    m.hyper.sigma = get_number(ls, "sigma");
  }
  m.hyper.validate();
  {
    auto ls = expect_line(in, "b");
    m.b = get_number(ls, "b");
  }
  const auto n = static_cast<Eigen::Index>([&] {
    auto ls = expect_line(in, "samples");
    return get_number(ls, "samples");
  }());
  const auto d = static_cast<Eigen::Index>([&] {
    auto ls = expect_line(in, "dims");
    return get_number(ls, "dims");
  }());
  if (n < 1 || d < 1) throw DataError("model file: samples and dims must be positive");
  bool normalized = false;
  {
    auto ls = expect_line(in, "normalized");
    normalized = get_number(ls, "normalized") != 0.0;
  }
  if (normalized) {
    NormParams np;
    auto ls = expect_line(in, "norm_target");
    np.target.min = get_number(ls, "norm_target min");
    np.target.max = get_number(ls, "norm_target max");
    for (Eigen::Index j = 0; j < d; ++j) {
      auto li = expect_line(in, "norm_input");
      ColumnRange c;
      c.min = get_number(li, "norm_input min");
      c.max = get_number(li, "norm_input max");
      np.inputs.push_back(c);
    }
    m.norm = np;
  }
  m.X_train.resize(n, d);
  m.alpha.resize(n);
  m.beta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto ls = expect_line(in, "row");
    for (Eigen::Index j = 0; j < d; ++j) m.X_train(i, j) = get_number(ls, "row value");
    m.alpha(i) = get_number(ls, "alpha");
    m.beta(i) = get_number(ls, "beta");
  }
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
  f << serialize_model(model);
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace ilssvm
