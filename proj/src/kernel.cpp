#include "ilssvm/kernel.hpp"

#include <cmath>
#include <sstream>

#include "ilssvm/error.hpp"

namespace ilssvm {

KernelSpec KernelSpec::rbf(double width) {
  KernelSpec s;
  s.family = KernelFamily::rbf;
  s.width = width;
  s.validate();
  return s;
}

KernelSpec KernelSpec::linear() {
  KernelSpec s;
  s.family = KernelFamily::linear;
  return s;
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  KernelSpec s;
  s.family = KernelFamily::polynomial;
  s.degree = degree;
  s.offset = offset;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (family == KernelFamily::rbf && !(width > 0.0 && std::isfinite(width)))
    throw InvalidArgument("rbf width must be positive and finite");
  if (family == KernelFamily::polynomial && degree < 1)
    throw InvalidArgument("polynomial degree must be at least 1");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw InvalidArgument("kernel arguments differ in dimension (" + std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()) + ")");
  switch (spec.family) {
    case KernelFamily::rbf: {
      double sq = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        const double diff = u[k] - v[k];
        sq += diff * diff;
      }
      return std::exp(-sq / (2.0 * spec.width * spec.width));
    }
    case KernelFamily::linear:
    case KernelFamily::polynomial: {
      double dot = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
      if (spec.family == KernelFamily::linear) return dot;
      return std::pow(dot + spec.offset, spec.degree);
    }
  }
  return 0.0;
}

namespace {

std::span<const double> row(const Matrix& X, Eigen::Index i) {
  return {X.row(i).data(), static_cast<std::size_t>(X.cols())};
}

void fill_gram_row(const KernelSpec& spec, const Matrix& X, Eigen::MatrixXd& G, Eigen::Index i) {
  for (Eigen::Index j = i; j < X.rows(); ++j) {
    const double k = kernel_eval(spec, row(X, i), row(X, j));
    G(i, j) = k;
    G(j, i) = k;
  }
}

}  // namespace

Eigen::MatrixXd gram(const KernelSpec& spec, const Matrix& X) {
  spec.validate();
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd G(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index i = 0; i < n; ++i) fill_gram_row(spec, X, G, i);
  return G;
}

Eigen::MatrixXd gram_serial(const KernelSpec& spec, const Matrix& X) {
  spec.validate();
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i) fill_gram_row(spec, X, G, i);
  return G;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  spec.validate();
  if (a.cols() != b.cols()) throw InvalidArgument("cross_gram: column counts differ");
  Eigen::MatrixXd K(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) K(i, j) = kernel_eval(spec, row(a, i), row(b, j));
  return K;
}

Eigen::MatrixXd cross_gram_serial(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  spec.validate();
  if (a.cols() != b.cols()) throw InvalidArgument("cross_gram: column counts differ");
  Eigen::MatrixXd K(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) K(i, j) = kernel_eval(spec, row(a, i), row(b, j));
  return K;
}

Eigen::MatrixXd centering_matrix(Eigen::Index n) {
  if (n < 1) throw InvalidArgument("centering_matrix needs n >= 1");
  Eigen::MatrixXd H = Eigen::MatrixXd::Constant(n, n, -1.0 / static_cast<double>(n));
  H.diagonal().array() += 1.0;
  return H;
}

std::string to_string(const KernelSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  switch (spec.family) {
    case KernelFamily::rbf: os << "rbf " << spec.width; break;
    case KernelFamily::linear: os << "linear"; break;
    case KernelFamily::polynomial: os << "polynomial " << spec.degree << ' ' << spec.offset; break;
  }
  return os.str();
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "rbf") return KernelFamily::rbf;
  if (name == "linear") return KernelFamily::linear;
  if (name == "polynomial") return KernelFamily::polynomial;
  throw InvalidArgument("unknown kernel family '" + name + "' (valid: rbf, linear, polynomial)");
}

}  // namespace ilssvm
