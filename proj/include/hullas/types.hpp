#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hullas {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace hullas
