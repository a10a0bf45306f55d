#pragma once

#include <Eigen/Dense>

namespace cvarcut {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;

// Scenario data is stored row-major: risk evaluation and cut aggregation
// stream over scenario rows.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace cvarcut
