#pragma once

#include <span>
#include <string>

#include <Eigen/Core>

#include "ilssvm/types.hpp"

namespace ilssvm {

enum class KernelFamily { rbf, linear, polynomial };

struct KernelSpec {
  KernelFamily family = KernelFamily::rbf;
  double width = 1.0;   // rbf
  int degree = 2;       // polynomial
  double offset = 1.0;  // polynomial

  static KernelSpec rbf(double width);
  static KernelSpec linear();
  static KernelSpec polynomial(int degree, double offset);

  void validate() const;
};

// rbf: exp(-|u-v|^2 / (2 w^2)); linear: u.v; polynomial: (u.v + c)^p.
double kernel_eval(const KernelSpec& spec, std::span<const double> u, std::span<const double> v);

// G(i, j) = k(x_i, x_j), filled from the upper triangle so G == G^T bitwise.
// gram() splits rows across OpenMP threads; gram_serial() is the reference
// loop and both produce identical bits.
Eigen::MatrixXd gram(const KernelSpec& spec, const Matrix& X);
Eigen::MatrixXd gram_serial(const KernelSpec& spec, const Matrix& X);

// K(i, j) = k(a_i, b_j), rows of `a` against rows of `b`.
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);
Eigen::MatrixXd cross_gram_serial(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// H = I - (1/N) 11^T.
Eigen::MatrixXd centering_matrix(Eigen::Index n);

std::string to_string(const KernelSpec& spec);
KernelFamily parse_kernel_family(const std::string& name);

}  // namespace ilssvm
