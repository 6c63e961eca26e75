#pragma once

#include <Eigen/Dense>

namespace embedprobe {

// Rows are samples (words, items). Row-major so a row is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

}  // namespace embedprobe
