#pragma once

#include <Eigen/Dense>

namespace gaitforge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace gaitforge
