#pragma once

#include <numbers>

namespace hsq::constants {

inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kBoltzmann = 1.380649e-23;       // J / K
inline constexpr double kSpeedOfLight = 299792458.0;     // m / s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F / m
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Vacuum (shot-noise) variance of a quadrature with X = (c^dag + c)/sqrt(2).
inline constexpr double kSql = 0.5;

}  // namespace hsq::constants
