#pragma once

#include <numbers>

namespace iwv {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018 exact values (SI defining constants).
inline constexpr double planck_h = 6.62607015e-34;   // J s
inline constexpr double speed_of_light = 2.99792458e8;  // m/s

/// Half-width of the transverse integration window in units of sigma.
/// The Gaussian mass beyond 8 sigma is below 1e-14.
inline constexpr double quadrature_half_width_sigmas = 8.0;

/// Beyond this k*sigma the small-misalignment formulas are flagged.
inline constexpr double weak_misalignment_guard = 0.8;

}  // namespace iwv
