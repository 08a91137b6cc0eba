#pragma once
// Photon-counting Monte Carlo of split detection at the dark port, and the
// closed-form shot-noise limits it is checked against.
//
// Split-detector calibration. In the phi << k sigma << 1 limit the dark-port
// density is p(z) = sin^2((phi + k z)/2) G(z) / P with G the input Gaussian.
// Its odd part is sin(phi) sin(k z) G(z) / (2P), so
//     E[A] = E[sign z] = sin(phi) * 2 * int_0^inf sin(kz) G dz / (2 P sqrt(2 pi) sigma)
//          ~ phi * k sigma^2 / (sqrt(2 pi) sigma (k sigma / 2)^2) = 4 phi / (sqrt(2 pi) k sigma).
// Inverting gives phi_hat = (sqrt(2 pi) / 4) k sigma A. Each detected photon
// contributes +-1 to A, so Var(A) ~ 1/D for D detected photons and
//     std(phi_hat) = (k sigma / 2) sqrt(pi/2) / sqrt(D) = sqrt(pi/2) / sqrt(N)
// with D = N (k sigma / 2)^2 for N photons sent. The misalignment cancels:
// a smaller k amplifies the shift but detects proportionally fewer photons.
// This is the split-detector limit for a Gaussian, sqrt(pi/2) sigma_z / sqrt(D),
// carried through z_hat = sqrt(pi/2) sigma A and phi_hat = k z_hat / 2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "iwv/constants.hpp"
#include "iwv/errors.hpp"
#include "iwv/optics.hpp"
#include "iwv/rng.hpp"
#include "iwv/weak_measurement.hpp"

namespace iwv {

/// Photon flux P lambda / (h c) of a monochromatic beam, photons per second.
inline double photons_per_second(double power, double lambda) {
  detail::require_finite(power, "power");
  if (power < 0.0) throw DomainError("optical power must be nonnegative");
  if (lambda <= 0.0) throw DomainError("lambda must be positive");
  return power * lambda / (planck_h * speed_of_light);
}

namespace detail {
// Acceptance probability of a photon at transverse position z under the
// 4 G(z) envelope: I_out(z) / (4 G(z)) = sin^2((phi + k z) / 2).
inline double darkport_acceptance(double z, double phi, double k) {
  const double s = std::sin(0.5 * (phi + k * z));
  return s * s;
}
}  // namespace detail

/// Draws `count` independent positions from the normalized dark-port density by
/// rejection against the envelope 4 exp(-z^2 / 2 sigma^2) >= I_out(z).
/// Overall acceptance equals the post-selection probability P; each draw may use
/// at most max(1e4, 50/P) envelope attempts.
inline std::vector<double> sample_darkport_positions(std::size_t count, double phi, double k, double sigma,
                                                     Xoshiro256& rng) {
  const double p = postselection_probability_exact(phi, k, sigma);
  if (!(p > 0.0)) throw NoLightError("dark port receives no light; nothing to sample");
  const auto cap = static_cast<std::uint64_t>(std::max(1e4, std::ceil(50.0 / p)));
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t attempt = 0;
    for (;;) {
      if (attempt++ == cap) throw NumericalError("rejection sampler exhausted its attempt budget");
      const double z = sigma * rng.normal();
      if (rng.uniform() < detail::darkport_acceptance(z, phi, k)) {
        out.push_back(z);
        break;
      }
    }
  }
  return out;
}

inline std::vector<double> sample_darkport_positions(std::size_t count, double phi, double k, double sigma,
                                                     std::uint64_t seed) {
  Xoshiro256 rng(seed);
  return sample_darkport_positions(count, phi, k, sigma, rng);
}

/// Sends `photons` photons from the input Gaussian through the interferometer and
/// returns the positions of those that exit the dark port. The detected count is
/// Binomial(photons, P_exact).
inline std::vector<double> transmit_photons(std::uint64_t photons, double phi, double k, double sigma,
                                            Xoshiro256& rng) {
  std::vector<double> out;
  for (std::uint64_t i = 0; i < photons; ++i) {
    const double z = sigma * rng.normal();
    if (rng.uniform() < detail::darkport_acceptance(z, phi, k)) out.push_back(z);
  }
  return out;
}

/// (N+ - N-) / M; z = 0 is counted in the upper half.
inline double split_detector_asymmetry(std::span<const double> positions) {
  if (positions.empty()) throw DomainError("split detector asymmetry of an empty record");
  const auto upper = std::count_if(positions.begin(), positions.end(), [](double z) { return z >= 0.0; });
  const auto lower = static_cast<std::ptrdiff_t>(positions.size()) - upper;
  return static_cast<double>(upper - lower) / static_cast<double>(positions.size());
}

/// Small-signal slope dE[A]/dphi = 4 / (sqrt(2 pi) k sigma).
inline double asymmetry_slope(double k, double sigma) { return 4.0 / (std::sqrt(2.0 * pi) * k * sigma); }

inline double estimate_phase(double asymmetry, double k, double sigma) {
  if (std::abs(asymmetry) > 0.3)
    warn("split-detector asymmetry " + std::to_string(asymmetry) + " is outside the linear regime");
  return std::sqrt(2.0 * pi) / 4.0 * k * sigma * asymmetry;
}

inline double estimate_tilt(double asymmetry, const OperatingPoint& op) {
  return tilt_from_phase(estimate_phase(asymmetry, op.k(), op.sigma()), op.geometry(), op.beam());
}

/// Split-detection phase noise for `photons` photons sent: sqrt(pi/2) / sqrt(N).
inline double shot_noise_phase(double photons) {
  if (!(photons >= 1.0)) throw DomainError("photon count must be at least 1");
  return std::sqrt(pi / 2.0) / std::sqrt(photons);
}

/// Tilt shot noise lambda / (4 sqrt(pi) L sqrt(N)), N in photons per second.
inline double shot_noise_tilt(double photon_rate, double lambda, double separation) {
  if (!(photon_rate > 0.0 && lambda > 0.0 && separation > 0.0))
    throw DomainError("shot_noise_tilt requires positive rate, wavelength and separation");
  return lambda / (4.0 * std::sqrt(pi) * separation * std::sqrt(photon_rate));
}

/// Gain of the separated-path layout over a collinear Sagnac: sqrt(2) sigma / L.
inline double collinear_penalty(double sigma, double separation) {
  if (!(sigma > 0.0 && separation > 0.0)) throw DomainError("collinear_penalty requires positive inputs");
  return std::sqrt(2.0) * sigma / separation;
}

struct MonteCarloConfig {
  OperatingPoint op;
  std::uint64_t photons = 1'000'000;  // photons sent per trial (N)
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct TrialResult {
  double phi_hat;
  double theta_hat;
  std::uint64_t detected;
};

struct MonteCarloReport {
  std::vector<TrialResult> trials;
  double mean_phi_hat = 0.0;
  double std_phi_hat = 0.0;
  double mean_theta_hat = 0.0;
  double std_theta_hat = 0.0;
  double mean_detected = 0.0;
  double theory_phi = 0.0;    // shot_noise_phase(N)
  double theory_theta = 0.0;  // theory_phi mapped to tilt
  double ratio = 0.0;         // std_phi_hat / theory_phi
  std::uint64_t seed = 0;
};

namespace detail {
inline TrialResult run_one_trial(const MonteCarloConfig& cfg, std::uint64_t index) {
  auto rng = Xoshiro256::substream(cfg.seed, index);
  const double phi = cfg.op.phi();
  const double k = cfg.op.k();
  const double sigma = cfg.op.sigma();
  std::uint64_t upper = 0, lower = 0;
  for (std::uint64_t i = 0; i < cfg.photons; ++i) {
    const double z = sigma * rng.normal();
    if (rng.uniform() < darkport_acceptance(z, phi, k)) (z >= 0.0 ? upper : lower)++;
  }
  const std::uint64_t detected = upper + lower;
  if (detected == 0) throw NumericalError("no photons detected in trial " + std::to_string(index));
  const double a = (static_cast<double>(upper) - static_cast<double>(lower)) / static_cast<double>(detected);
  const double phi_hat = std::sqrt(2.0 * pi) / 4.0 * k * sigma * a;
  return {phi_hat, tilt_from_phase(phi_hat, cfg.op.geometry(), cfg.op.beam()), detected};
}

inline std::pair<double, double> mean_and_std(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}
}  // namespace detail

/// Runs independent trials on per-trial substreams. Results are indexed by trial,
/// so the report does not depend on the thread count.
inline MonteCarloReport run_trials(const MonteCarloConfig& cfg) {
  if (cfg.photons < 1 || cfg.trials < 1) throw DomainError("Monte Carlo needs photons >= 1 and trials >= 1");
  if (!(postselection_probability_exact(cfg.op.phi(), cfg.op.k(), cfg.op.sigma()) > 0.0))
    throw NoLightError("dark port receives no light; nothing to detect");

  MonteCarloReport rep;
  rep.seed = cfg.seed;
  rep.trials.resize(cfg.trials);

  unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = static_cast<unsigned>(std::min<std::uint64_t>(nthreads, cfg.trials));
  std::vector<std::exception_ptr> errors(nthreads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t t = w; t < cfg.trials; t += nthreads) rep.trials[t] = detail::run_one_trial(cfg, t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> phis, thetas;
  double detected = 0.0;
  for (const auto& t : rep.trials) {
    phis.push_back(t.phi_hat);
    thetas.push_back(t.theta_hat);
    detected += static_cast<double>(t.detected);
  }
  std::tie(rep.mean_phi_hat, rep.std_phi_hat) = detail::mean_and_std(phis);
  std::tie(rep.mean_theta_hat, rep.std_theta_hat) = detail::mean_and_std(thetas);
  rep.mean_detected = detected / static_cast<double>(cfg.trials);
  rep.theory_phi = shot_noise_phase(static_cast<double>(cfg.photons));
  rep.theory_theta = tilt_from_phase(rep.theory_phi, cfg.op.geometry(), cfg.op.beam());
  rep.ratio = rep.std_phi_hat / rep.theory_phi;
  return rep;
}

}  // namespace iwv
