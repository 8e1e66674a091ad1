#pragma once

#include <Eigen/Core>

namespace ilssvm {

// Samples are rows; row-major so a sample is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace ilssvm
