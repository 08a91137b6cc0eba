#pragma once
// Qubit (which-path) x meter (transverse coordinate) description of the dark port.
//
//   pre-selection   |i> = (|cw> + |ccw>) / sqrt(2)
//   coupling        U   = exp(-i g sigma3 (x) z),  g = k / 2
//   post-selection  |f> = (|cw> - e^{i phi} |ccw>) / sqrt(2)
//
// The global phase of |f> is kept as written; only |<f|...>|^2 is observable.
//
// Frame: with this U the post-selected meter amplitude in the meter's own
// coordinate is proportional to sin((phi - k z)/2), the mirror image of the
// classical dark-port field. The split detector's "upper" half is taken along
// -z_meter so that phi > 0, k > 0 gives a positive shift, matching optics.hpp.
// meter_amplitude() and meter_pdf() are expressed in that detector frame.

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "iwv/constants.hpp"
#include "iwv/errors.hpp"
#include "iwv/optics.hpp"

namespace iwv {

using cplx = std::complex<double>;
using Qubit = std::array<cplx, 2>;  // components along |cw>, |ccw>

inline cplx inner(const Qubit& bra, const Qubit& ket) {
  return std::conj(bra[0]) * ket[0] + std::conj(bra[1]) * ket[1];
}

inline Qubit apply_sigma3(const Qubit& q) { return {q[0], -q[1]}; }

/// Fixed pre-selection and phi-dependent post-selection.
class QubitSelection {
public:
  explicit QubitSelection(double phi) : phi_(phi) { detail::require_finite(phi, "phi"); }

  double phi() const { return phi_; }

  Qubit pre() const {
    const double r = 1.0 / std::sqrt(2.0);
    return {cplx(r, 0.0), cplx(r, 0.0)};
  }

  Qubit post() const {
    const double r = 1.0 / std::sqrt(2.0);
    return {cplx(r, 0.0), -r * std::polar(1.0, phi_)};
  }

  /// <f|i> = (1 - e^{-i phi}) / 2
  cplx overlap() const { return inner(post(), pre()); }

  cplx sigma3_element() const { return inner(post(), apply_sigma3(pre())); }

private:
  double phi_;
};

/// Gaussian meter |Psi> with width sigma and coupling g = k / 2.
class MeterState {
public:
  MeterState(double sigma, double coupling) : sigma_(sigma), coupling_(coupling) {
    detail::require_finite(sigma, "sigma");
    detail::require_finite(coupling, "g");
    if (sigma <= 0.0) throw DomainError("sigma must be positive");
  }

  static MeterState from_misalignment(double k, double sigma) { return {sigma, 0.5 * k}; }

  double sigma() const { return sigma_; }
  double coupling() const { return coupling_; }
  double misalignment() const { return 2.0 * coupling_; }

  /// <z|Psi> = (sqrt(2 pi) sigma)^{-1/2} exp(-z^2 / 4 sigma^2)
  double wavefunction(double z) const {
    return std::exp(-z * z / (4.0 * sigma_ * sigma_)) / std::sqrt(std::sqrt(2.0 * pi) * sigma_);
  }

private:
  double sigma_;
  double coupling_;
};

namespace detail {
inline bool is_dark_phase(double phi) {
  const double h = std::sin(0.5 * phi);
  return h == 0.0;
}
}  // namespace detail

/// Weak value of sigma3: -i cot(phi / 2).
inline cplx weak_value(double phi) {
  detail::require_finite(phi, "phi");
  if (detail::is_dark_phase(phi))
    throw PostSelectionError("post-selection orthogonal to pre-selection (phi = 0 mod 2pi)");
  return {0.0, -std::cos(0.5 * phi) / std::sin(0.5 * phi)};
}

/// Weak value from explicit matrix elements <f|sigma3|i> / <f|i>.
inline cplx weak_value_from_states(const QubitSelection& sel) {
  const cplx ov = sel.overlap();
  if (std::abs(ov) == 0.0 || detail::is_dark_phase(sel.phi()))
    throw PostSelectionError("post-selection orthogonal to pre-selection (phi = 0 mod 2pi)");
  return sel.sigma3_element() / ov;
}

/// Exact post-selection probability (1 - cos(phi) exp(-k^2 sigma^2 / 2)) / 2.
inline double postselection_probability_exact(double phi, double k, double sigma) {
  detail::require_finite(phi, "phi");
  detail::require_finite(k, "k");
  if (sigma <= 0.0) throw DomainError("sigma must be positive");
  return 0.5 * detail::darkport_denominator(phi, k, sigma) * std::exp(-0.5 * k * k * sigma * sigma);
}

/// Weak-interaction post-selection probability sin^2(phi/2) + (k sigma / 2)^2 cos(phi).
inline double postselection_probability(double phi, double k, double sigma) {
  detail::require_finite(phi, "phi");
  detail::require_finite(k, "k");
  if (sigma <= 0.0) throw DomainError("sigma must be positive");
  const double x = k * sigma;
  if (std::abs(x) > weak_misalignment_guard)
    warn("k*sigma = " + std::to_string(x) + " exceeds the weak-interaction guard; "
         "use postselection_probability_exact");
  const double h = std::sin(0.5 * phi);
  return h * h + 0.25 * x * x * std::cos(phi);
}

/// Dark-port power fraction by adaptive quadrature of the classical intensity.
inline double postselection_probability_quadrature(double phi, double k, double sigma) {
  using boost::math::quadrature::gauss_kronrod;
  const double a = quadrature_half_width_sigmas * sigma;
  const double total = gauss_kronrod<double, 61>::integrate(
      [&](double z) { return darkport_intensity(z, phi, k, sigma); }, -a, a, 15, 1e-13);
  return total / (4.0 * std::sqrt(2.0 * pi) * sigma);
}

/// Post-selected meter amplitude in the detector frame, normalized by sqrt(P_exact).
inline cplx meter_amplitude(double z, double phi, double k, double sigma) {
  const double p = postselection_probability_exact(phi, k, sigma);
  if (!(p > 0.0)) throw NoLightError("post-selection probability is zero");
  const QubitSelection sel(phi);
  const MeterState meter = MeterState::from_misalignment(k, sigma);
  const double zeta = -z;  // meter coordinate
  const Qubit i = sel.pre();
  const double gz = meter.coupling() * zeta;
  const Qubit coupled{i[0] * std::polar(1.0, -gz), i[1] * std::polar(1.0, gz)};
  return inner(sel.post(), coupled) * meter.wavefunction(zeta) / std::sqrt(p);
}

/// |<z|Psi_f>|^2, normalized to unit area.
inline double meter_pdf(double z, double phi, double k, double sigma) {
  return std::norm(meter_amplitude(z, phi, k, sigma));
}

/// Quantum mean shift 2 k sigma^2 sin(phi) / (4 sin^2(phi/2) + k^2 sigma^2 cos(phi)).
inline double quantum_mean_shift(double phi, double k, double sigma) {
  detail::require_finite(phi, "phi");
  detail::require_finite(k, "k");
  if (sigma <= 0.0) throw DomainError("sigma must be positive");
  const double x = k * sigma;
  const double h = std::sin(0.5 * phi);
  const double den = 4.0 * h * h + x * x * std::cos(phi);
  if (den == 0.0) throw NoLightError("dark port receives no light (phi = 0 and k = 0)");
  return 2.0 * k * sigma * sigma * std::sin(phi) / den;
}

/// Inverse-weak-value centroid -(4/k) Im(sigma_w) / |sigma_w|^2 = 4 tan(phi/2) / k.
inline double iwva_mean_shift(double phi, double k) {
  if (k == 0.0) throw DomainError("iwva_mean_shift requires k != 0");
  if (detail::is_dark_phase(phi)) return 0.0;
  const cplx w = weak_value(phi);
  return -(4.0 / k) * w.imag() / std::norm(w);
}

enum class Regime { IWVA, WVA, Intermediate };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::IWVA: return "IWVA";
    case Regime::WVA: return "WVA";
    case Regime::Intermediate: return "INTERMEDIATE";
  }
  return "?";
}

/// kappa = k sigma |sigma_w|. The regimes are only defined by << / >>; these cut-offs are a choice.
struct RegimeThresholds {
  double lo = 0.3;
  double hi = 3.0;
};

struct RegimeReport {
  double kappa;
  Regime label;
  RegimeThresholds thresholds;
};

/// phi = 0 mod 2pi is classified IWVA by continuity (kappa = +inf).
inline RegimeReport regime_classify(double phi, double k, double sigma, RegimeThresholds th = {}) {
  detail::require_finite(phi, "phi");
  detail::require_finite(k, "k");
  if (!(th.lo > 0.0 && th.lo < th.hi)) throw DomainError("regime thresholds need 0 < lo < hi");
  double kappa;
  if (detail::is_dark_phase(phi)) {
    kappa = std::numeric_limits<double>::infinity();
  } else {
    kappa = std::abs(k * sigma) * std::abs(weak_value(phi).imag());
  }
  Regime label = Regime::Intermediate;
  if (kappa >= th.hi)
    label = Regime::IWVA;
  else if (kappa <= th.lo)
    label = Regime::WVA;
  return {kappa, label, th};
}

struct WvaPrediction {
  double shift;        // m, 2 k sigma^2 / phi
  double probability;  // sin^2(phi / 2)
};

inline WvaPrediction wva_predictions(double phi, double k, double sigma, RegimeThresholds th = {}) {
  detail::require_finite(phi, "phi");
  if (phi == 0.0) throw DomainError("wva_predictions requires phi != 0");
  const auto report = regime_classify(phi, k, sigma, th);
  if (report.label != Regime::WVA)
    warn("wva_predictions outside the WVA regime (kappa = " + std::to_string(report.kappa) + ")");
  const double h = std::sin(0.5 * phi);
  return {2.0 * k * sigma * sigma / phi, h * h};
}

}  // namespace iwv
