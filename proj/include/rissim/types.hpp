#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rissim {

using Complex = std::complex<double>;

using Eigen::ArrayXd;
using Eigen::ArrayXXd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

// Reflection coefficients of one surface: row = subcarrier, column = element.
using ReflectionProfile = MatrixXcd;

inline constexpr double kLn2 = 0.69314718055994530942;

}  // namespace rissim
