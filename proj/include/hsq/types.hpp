#pragma once

#include <complex>

#include <Eigen/Core>

namespace hsq {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using CMat6 = Eigen::Matrix<Complex, 6, 6>;
using CVec6 = Eigen::Matrix<Complex, 6, 1>;

// Ordering of the fluctuation vector (dq, dp, dX, dY, dx, dy).
enum Quadrature : int { kMechQ = 0, kMechP = 1, kCavX = 2, kCavY = 3, kAtomX = 4, kAtomY = 5 };

}  // namespace hsq
