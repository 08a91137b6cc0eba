#pragma once
// Classical optics of the misaligned Sagnac dark port.
//
// Coordinates: z is the transverse (vertical) detector coordinate in meters.
// A positive tilt theta produces a positive phase phi, and for k > 0 a positive
// mean shift <z>. The intensity returned here is the unnormalized integrand
// |1 - exp(i(phi + k z))|^2 exp(-z^2 / 2 sigma^2); every observable is a ratio.

#include <cmath>
#include <string>

#include "iwv/constants.hpp"
#include "iwv/errors.hpp"

namespace iwv {

/// Gaussian input mode. sigma is half the 1/e^2 intensity radius (beam diameter = 4 sigma).
class BeamParams {
public:
  BeamParams(double sigma, double lambda) : sigma_(sigma), lambda_(lambda), k0_(2.0 * pi / lambda) {
    detail::require_finite(sigma, "sigma");
    detail::require_finite(lambda, "lambda");
    if (sigma <= 0.0) throw DomainError("sigma must be positive");
    if (lambda <= 0.0) throw DomainError("lambda must be positive");
  }

  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }
  double k0() const { return k0_; }

private:
  double sigma_;
  double lambda_;
  double k0_;
};

/// Beam separation parameter L at the tilted mirror and the misalignment kick k.
/// The sign of k is the misalignment direction.
class Geometry {
public:
  Geometry(double separation, double kick) : separation_(separation), kick_(kick) {
    detail::require_finite(separation, "L");
    detail::require_finite(kick, "k");
    if (separation <= 0.0) throw DomainError("L must be positive");
  }

  double separation() const { return separation_; }
  double kick() const { return kick_; }

private:
  double separation_;
  double kick_;
};

inline double phase_from_tilt(double theta, const Geometry& geom, const BeamParams& beam) {
  detail::require_finite(theta, "theta");
  return std::sqrt(2.0) * beam.k0() * geom.separation() * theta;
}

inline double tilt_from_phase(double phi, const Geometry& geom, const BeamParams& beam) {
  detail::require_finite(phi, "phi");
  return phi / (std::sqrt(2.0) * beam.k0() * geom.separation());
}

/// Interferometer state. phi is always derived from theta, never stored separately.
class OperatingPoint {
public:
  OperatingPoint(BeamParams beam, Geometry geom, double theta)
      : beam_(beam), geom_(geom), theta_(theta) {
    detail::require_finite(theta, "theta");
  }

  static OperatingPoint from_phase(BeamParams beam, Geometry geom, double phi) {
    return {beam, geom, tilt_from_phase(phi, geom, beam)};
  }

  const BeamParams& beam() const { return beam_; }
  const Geometry& geometry() const { return geom_; }
  double theta() const { return theta_; }
  double phi() const { return phase_from_tilt(theta_, geom_, beam_); }
  double k() const { return geom_.kick(); }
  double sigma() const { return beam_.sigma(); }
  double k_sigma() const { return geom_.kick() * beam_.sigma(); }

private:
  BeamParams beam_;
  Geometry geom_;
  double theta_;
};

inline double darkport_intensity(double z, double phi, double k, double sigma) {
  detail::require_finite(z, "z");
  detail::require_finite(phi, "phi");
  detail::require_finite(k, "k");
  detail::require_finite(sigma, "sigma");
  if (sigma <= 0.0) throw DomainError("sigma must be positive");
  const double s = std::sin(0.5 * (phi + k * z));
  return 4.0 * s * s * std::exp(-z * z / (2.0 * sigma * sigma));
}

namespace detail {
// e^{x^2/2} - cos(phi), written so that it keeps full precision as both go to zero.
inline double darkport_denominator(double phi, double k, double sigma) {
  const double x = k * sigma;
  const double h = std::sin(0.5 * phi);
  return std::expm1(0.5 * x * x) + 2.0 * h * h;
}
}  // namespace detail

/// Closed-form centroid of the dark-port distribution,
/// k sigma^2 sin(phi) / (exp(k^2 sigma^2 / 2) - cos(phi)).
inline double mean_shift_exact(double phi, double k, double sigma) {
  detail::require_finite(phi, "phi");
  detail::require_finite(k, "k");
  detail::require_finite(sigma, "sigma");
  if (sigma <= 0.0) throw DomainError("sigma must be positive");
  const double den = detail::darkport_denominator(phi, k, sigma);
  if (den == 0.0) throw NoLightError("dark port receives no light (phi = 0 and k = 0)");
  return k * sigma * sigma * std::sin(phi) / den;
}

/// Small-signal centroid 2 phi / k, valid for phi << k sigma << 1.
inline double mean_shift_approx(double phi, double k) {
  detail::require_finite(phi, "phi");
  detail::require_finite(k, "k");
  if (k == 0.0) throw DomainError("mean_shift_approx requires k != 0");
  return 2.0 * phi / k;
}

/// Fraction of the input power reaching the dark port, (k sigma / 2)^2.
inline double detected_fraction(double k, double sigma) {
  const double x = k * sigma;
  if (std::abs(x) > weak_misalignment_guard)
    warn("k*sigma = " + std::to_string(x) + " is outside the weak-misalignment range");
  return 0.25 * x * x;
}

/// Inverse of detected_fraction: ratio is bright-port power over dark-port power.
inline double misalignment_from_power_ratio(double ratio, double sigma) {
  detail::require_finite(ratio, "power ratio");
  if (ratio <= 1.0) throw DomainError("power ratio must exceed 1");
  if (sigma <= 0.0) throw DomainError("sigma must be positive");
  return (2.0 / sigma) / std::sqrt(ratio);
}

inline double misalignment_angle(double k, const BeamParams& beam) { return k / beam.k0(); }

inline double differential_displacement(double theta, const Geometry& geom) {
  return theta * geom.separation();
}

}  // namespace iwv
