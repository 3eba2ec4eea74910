#pragma once

#include <Eigen/Dense>

namespace musco {

using Scalar = double;

using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using RowVec2 = Eigen::Matrix<Scalar, 1, 2>;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace musco
