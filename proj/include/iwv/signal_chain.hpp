#pragma once
// Time-domain synthesis of the detector record: tilt waveforms, tilt-equivalent
// colored noise, per-sample shot noise and the first-order preamplifier filters.
// All noise is injected as tilt-equivalent radians at the detector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "iwv/constants.hpp"
#include "iwv/errors.hpp"
#include "iwv/fft.hpp"
#include "iwv/optics.hpp"
#include "iwv/photon_montecarlo.hpp"
#include "iwv/rng.hpp"
#include "iwv/weak_measurement.hpp"

namespace iwv {

/// One-sided tilt-equivalent amplitude spectral density, rad/sqrt(Hz).
///
/// The piecewise part interpolates linearly in log-log between anchors and is
/// flat beyond the first and last anchor. The white floor adds in power:
///   ASD(f) = sqrt(piecewise(f)^2 + white_floor^2).
/// No anchors and a zero floor is the zero spectrum.
struct NoiseSpec {
  struct Anchor {
    double frequency;  // Hz
    double asd;        // rad/sqrt(Hz)
  };

  std::vector<Anchor> anchors;
  double white_floor = 0.0;

  static NoiseSpec white(double asd) { return {{}, asd}; }

  void validate() const {
    if (!(white_floor >= 0.0) || !std::isfinite(white_floor))
      throw DomainError("noise spec white floor must be finite and nonnegative");
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const auto& a = anchors[i];
      if (!(a.frequency > 0.0) || !std::isfinite(a.frequency))
        throw DomainError("noise spec anchor frequencies must be positive");
      if (!(a.asd > 0.0) || !std::isfinite(a.asd)) throw DomainError("noise spec anchor ASD must be positive");
      if (i > 0 && !(a.frequency > anchors[i - 1].frequency))
        throw DomainError("noise spec anchor frequencies must be strictly increasing");
    }
  }

  double piecewise(double f) const {
    if (anchors.empty()) return 0.0;
    if (f <= anchors.front().frequency) return anchors.front().asd;
    if (f >= anchors.back().frequency) return anchors.back().asd;
    const auto hi = std::upper_bound(anchors.begin(), anchors.end(), f,
                                     [](double x, const Anchor& a) { return x < a.frequency; });
    const auto lo = hi - 1;
    const double t = std::log(f / lo->frequency) / std::log(hi->frequency / lo->frequency);
    return std::exp(std::log(lo->asd) + t * std::log(hi->asd / lo->asd));
  }

  double asd(double f) const { return std::sqrt(psd(f)); }

  double psd(double f) const {
    const double p = piecewise(f);
    return p * p + white_floor * white_floor;
  }
};

/// Uniformly sampled tilt-equivalent record.
struct TimeSeries {
  std::vector<double> samples;
  double sample_rate = 1.0;  // Hz
  double start_time = 0.0;   // s
  std::optional<std::uint64_t> seed;
  std::string unit = "rad";
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  double dt() const { return 1.0 / sample_rate; }
  double time(std::size_t i) const { return start_time + static_cast<double>(i) / sample_rate; }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

  void validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw DomainError("sample rate must be positive");
    if (samples.size() < 2) throw DomainError("time series needs at least two samples");
    for (double v : samples)
      if (!std::isfinite(v)) throw DomainError("time series contains non-finite samples");
  }
};

/// Sample-wise sum; metadata of `a` is kept, provenance joined.
inline TimeSeries add(const TimeSeries& a, const TimeSeries& b) {
  if (a.size() != b.size() || a.sample_rate != b.sample_rate)
    throw DomainError("cannot add time series with different length or sample rate");
  TimeSeries out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += b.samples[i];
  if (!b.provenance.empty()) out.provenance = a.provenance.empty() ? b.provenance : a.provenance + "+" + b.provenance;
  return out;
}

inline std::size_t sample_count(double sample_rate, double duration) {
  if (!(sample_rate > 0.0) || !(duration > 0.0)) throw DomainError("sample rate and duration must be positive");
  return static_cast<std::size_t>(std::llround(sample_rate * duration));
}

/// theta(t_i) = a sin(2 pi f t_i), t_i = i / fs.
inline TimeSeries sine_tilt(double amplitude, double frequency, double sample_rate, double duration) {
  detail::require_finite(amplitude, "amplitude");
  if (!(frequency >= 0.0)) throw DomainError("tone frequency must be nonnegative");
  if (!(frequency < 0.5 * sample_rate)) throw DomainError("tone frequency at or above Nyquist aliases");
  TimeSeries ts;
  ts.sample_rate = sample_rate;
  ts.samples.resize(sample_count(sample_rate, duration));
  for (std::size_t i = 0; i < ts.size(); ++i)
    ts.samples[i] = amplitude * std::sin(2.0 * pi * frequency * (static_cast<double>(i) / sample_rate));
  ts.provenance = "sine";
  ts.validate();
  return ts;
}

/// Frequency-domain synthesis. Each positive-frequency bin 0 < k < n/2 receives a
/// circular complex Gaussian with E|X_k|^2 = S(f_k) fs n / 2; the Nyquist bin
/// (n even) is real with E X^2 = S fs n; DC is zero. The one-sided periodogram
/// of the result has expectation S(f_k) on the grid f_k = k fs / n.
inline TimeSeries colored_noise(const NoiseSpec& spec, std::size_t n, double sample_rate, std::uint64_t seed) {
  spec.validate();
  if (n < 16) throw DomainError("colored_noise needs n >= 16");
  if (!(sample_rate > 0.0)) throw DomainError("sample rate must be positive");
  Xoshiro256 rng(seed);
  const std::size_t m = n / 2 + 1;
  std::vector<std::complex<double>> X(m, {0.0, 0.0});
  const double nd = static_cast<double>(n);
  for (std::size_t k = 1; k < m; ++k) {
    const double f = static_cast<double>(k) * sample_rate / nd;
    const double re = rng.normal();
    const double im = rng.normal();
    if (n % 2 == 0 && k == n / 2) {
      X[k] = {std::sqrt(spec.psd(f) * sample_rate * nd) * re, 0.0};
    } else {
      const double scale = std::sqrt(spec.psd(f) * sample_rate * nd / 4.0);
      X[k] = {scale * re, scale * im};
    }
  }
  TimeSeries ts;
  ts.sample_rate = sample_rate;
  ts.seed = seed;
  ts.provenance = "colored_noise";
  ts.samples = fft::inverse_real(X, n);
  for (double& v : ts.samples) v /= nd;
  return ts;
}

/// Per-sample shot-noise standard deviation of the tilt estimate. The shot-noise
/// value lambda / (4 sqrt(pi) L sqrt(N)) is read as a one-sided ASD with N in
/// photons per second, so the per-sample std is ASD * sqrt(fs / 2).
inline double shot_noise_per_sample(const OperatingPoint& op, double photon_rate, double sample_rate) {
  return shot_noise_tilt(photon_rate, op.beam().lambda(), op.geometry().separation()) * std::sqrt(0.5 * sample_rate);
}

/// Adds Gaussian split-detector shot noise to a tilt record. `photon_rate` is the
/// input photon flux (1/s); +infinity gives the noiseless limit. Noise draws depend
/// only on the seed, so the deterministic part scales linearly with the input.
inline TimeSeries simulate_detector_series(const TimeSeries& tilt, const OperatingPoint& op, double photon_rate,
                                           std::uint64_t seed) {
  tilt.validate();
  if (!(photon_rate > 0.0)) throw DomainError("photon rate must be positive");
  TimeSeries out = tilt;
  out.seed = seed;
  out.unit = "rad";
  out.provenance = tilt.provenance.empty() ? "detector" : tilt.provenance + "+detector";

  double max_phi = 0.0;
  for (double th : tilt.samples) max_phi = std::max(max_phi, std::abs(phase_from_tilt(th, op.geometry(), op.beam())));
  if (max_phi > 0.1 * std::abs(op.k_sigma()))
    warn("phase excursion " + std::to_string(max_phi) + " rad is not small against k*sigma; split detection is nonlinear");

  if (std::isinf(photon_rate)) return out;

  // Detected photons per sample at the operating point; below ~100 the Gaussian
  // approximation of the counting estimator breaks down.
  const double p = postselection_probability_exact(op.phi(), op.k(), op.sigma());
  const double detected_per_sample = photon_rate * p / tilt.sample_rate;
  if (detected_per_sample < 100.0)
    throw NumericalError("only " + std::to_string(detected_per_sample) +
                         " detected photons per sample; use the photon Monte Carlo for exact counting");

  const double sd = shot_noise_per_sample(op, photon_rate, tilt.sample_rate);
  Xoshiro256 rng(seed);
  for (double& v : out.samples) v += sd * rng.normal();
  return out;
}

/// Preamplifier model: optional first-order high-pass at f_lo, first-order
/// low-pass at f_hi, linear gain. Each section rolls off at 6 dB/octave.
struct FilterSpec {
  std::optional<double> f_lo;  // Hz
  double f_hi = 300.0;         // Hz
  double gain = 1.0;

  void validate(double sample_rate) const {
    if (!(gain > 0.0)) throw DomainError("filter gain must be positive");
    if (!(f_hi > 0.0)) throw DomainError("low-pass corner must be positive");
    if (!(f_hi < 0.5 * sample_rate)) throw DomainError("low-pass corner at or above Nyquist");
    if (f_lo && !(*f_lo > 0.0 && *f_lo < f_hi)) throw DomainError("need 0 < f_lo < f_hi");
  }
};

/// First-order section y[n] = b0 x[n] + b1 x[n-1] - a1 y[n-1].
struct FirstOrderSection {
  double b0, b1, a1;
  double dc_gain;

  // Bilinear transform with the corner prewarped: K = tan(pi fc / fs).
  static FirstOrderSection lowpass(double fc, double fs) {
    const double K = std::tan(pi * fc / fs);
    return {K / (1.0 + K), K / (1.0 + K), (K - 1.0) / (K + 1.0), 1.0};
  }
  static FirstOrderSection highpass(double fc, double fs) {
    const double K = std::tan(pi * fc / fs);
    return {1.0 / (1.0 + K), -1.0 / (1.0 + K), (K - 1.0) / (K + 1.0), 0.0};
  }

  std::complex<double> response(double f, double fs) const {
    const auto zinv = std::polar(1.0, -2.0 * pi * f / fs);
    return (b0 + b1 * zinv) / (1.0 + a1 * zinv);
  }

  // State starts at the steady state for a constant input equal to the first sample.
  void run(std::vector<double>& x) const {
    if (x.empty()) return;
    double x_prev = x.front();
    double y_prev = dc_gain * x.front();
    for (double& v : x) {
      const double y = b0 * v + b1 * x_prev - a1 * y_prev;
      x_prev = v;
      y_prev = y;
      v = y;
    }
  }
};

inline std::vector<FirstOrderSection> filter_sections(const FilterSpec& spec, double sample_rate) {
  spec.validate(sample_rate);
  std::vector<FirstOrderSection> s;
  if (spec.f_lo) s.push_back(FirstOrderSection::highpass(*spec.f_lo, sample_rate));
  s.push_back(FirstOrderSection::lowpass(spec.f_hi, sample_rate));
  return s;
}

/// Complex frequency response of the discretized filter, gain included.
inline std::complex<double> filter_response(const FilterSpec& spec, double f, double sample_rate) {
  std::complex<double> h = spec.gain;
  for (const auto& s : filter_sections(spec, sample_rate)) h *= s.response(f, sample_rate);
  return h;
}

inline TimeSeries apply_filter(const TimeSeries& series, const FilterSpec& spec) {
  series.validate();
  TimeSeries out = series;
  for (const auto& s : filter_sections(spec, series.sample_rate)) s.run(out.samples);
  for (double& v : out.samples) v *= spec.gain;
  out.provenance = series.provenance.empty() ? "filter" : series.provenance + "+filter";
  return out;
}

}  // namespace iwv
