#pragma once
// One-sided amplitude spectral density estimation.
//
// Conventions, for a record x_0..x_{n-1} sampled at fs with window w:
//   PSD_k = c_k |X_k|^2 / (fs * sum_j w_j^2),  c_k = 2 for 0 < k < n/2, 1 at Nyquist,
//   ASD_k = sqrt(PSD_k),  f_k = k fs / n,  k = 1 .. floor(n/2)  (DC excluded).
// The record mean is removed before windowing. With the rectangular window
// sum_k PSD_k * df equals the (population) variance of the record.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "iwv/constants.hpp"
#include "iwv/errors.hpp"
#include "iwv/fft.hpp"
#include "iwv/optics.hpp"
#include "iwv/signal_chain.hpp"

namespace iwv {

enum class Window { Rectangular, Hann };

inline std::string to_string(Window w) { return w == Window::Hann ? "hann" : "rectangular"; }

inline Window window_from_string(const std::string& s) {
  if (s == "hann") return Window::Hann;
  if (s == "rectangular" || s == "rect") return Window::Rectangular;
  throw DomainError("unknown window '" + s + "'");
}

struct SpectrumEstimate {
  std::vector<double> frequency;  // Hz, uniform, first bin at resolution
  std::vector<double> asd;        // unit / sqrt(Hz)
  double resolution = 0.0;        // Hz
  double sample_rate = 0.0;       // Hz
  Window window = Window::Rectangular;
  std::size_t smoothing = 1;   // moving-average width applied to asd
  std::size_t segments = 1;    // number of averaged periodograms
  std::string unit = "rad/sqrt(Hz)";

  std::size_t size() const { return asd.size(); }
};

namespace detail {
inline std::vector<double> window_coefficients(Window w, std::size_t n) {
  std::vector<double> c(n, 1.0);
  if (w == Window::Hann)  // periodic form
    for (std::size_t j = 0; j < n; ++j) c[j] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(j) / n));
  return c;
}

// One-sided PSD of x[first, first + len), bins 1..len/2.
inline std::vector<double> segment_psd(std::span<const double> x, const std::vector<double>& win, double fs) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> buf(n);
  double wss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    buf[j] = (x[j] - mean) * win[j];
    wss += win[j] * win[j];
  }
  const auto X = fft::forward_real(buf);
  std::vector<double> psd(n / 2);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double c = (n % 2 == 0 && k == n / 2) ? 1.0 : 2.0;
    psd[k - 1] = c * std::norm(X[k]) / (fs * wss);
  }
  return psd;
}

inline SpectrumEstimate make_estimate(std::size_t n, double fs, Window w) {
  SpectrumEstimate s;
  s.sample_rate = fs;
  s.resolution = fs / static_cast<double>(n);
  s.window = w;
  s.frequency.resize(n / 2);
  for (std::size_t k = 1; k <= n / 2; ++k) s.frequency[k - 1] = static_cast<double>(k) * s.resolution;
  return s;
}

inline double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}
}  // namespace detail

inline SpectrumEstimate periodogram_asd(const TimeSeries& series, Window window = Window::Rectangular) {
  if (series.size() < 16) throw DomainError("periodogram needs at least 16 samples");
  series.validate();
  auto est = detail::make_estimate(series.size(), series.sample_rate, window);
  const auto psd = detail::segment_psd(series.samples, detail::window_coefficients(window, series.size()),
                                       series.sample_rate);
  est.asd.resize(psd.size());
  std::transform(psd.begin(), psd.end(), est.asd.begin(), [](double p) { return std::sqrt(p); });
  return est;
}

/// Welch estimate: mean of windowed periodograms of segments of `segment_length`
/// samples overlapping by `overlap` samples. Trailing samples that do not fill a
/// segment are dropped.
inline SpectrumEstimate averaged_asd(const TimeSeries& series, std::size_t segment_length, std::size_t overlap,
                                     Window window = Window::Hann) {
  series.validate();
  if (segment_length < 16 || segment_length > series.size())
    throw DomainError("segment length must be in [16, n]");
  if (overlap >= segment_length) throw DomainError("overlap must be smaller than the segment length");
  const std::size_t step = segment_length - overlap;
  const std::size_t count = 1 + (series.size() - segment_length) / step;
  const auto win = detail::window_coefficients(window, segment_length);
  auto est = detail::make_estimate(segment_length, series.sample_rate, window);
  std::vector<double> acc(segment_length / 2, 0.0);
  const std::span<const double> all(series.samples);
  for (std::size_t s = 0; s < count; ++s) {
    const auto psd = detail::segment_psd(all.subspan(s * step, segment_length), win, series.sample_rate);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += psd[k];
  }
  est.asd.resize(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) est.asd[k] = std::sqrt(acc[k] / static_cast<double>(count));
  est.segments = count;
  return est;
}

/// Centered moving average of width w (odd). Near the ends the window shrinks
/// symmetrically to 1, 3, 5, ... points, so the length is preserved.
inline SpectrumEstimate moving_average_smooth(const SpectrumEstimate& spectrum, std::size_t w) {
  if (w == 0 || w % 2 == 0) throw DomainError("moving average width must be odd and positive");
  SpectrumEstimate out = spectrum;
  const std::size_t n = spectrum.size();
  const std::size_t half = w / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    double s = 0.0;
    for (std::size_t j = i - h; j <= i + h; ++j) s += spectrum.asd[j];
    out.asd[i] = s / static_cast<double>(2 * h + 1);
  }
  out.smoothing = w;
  return out;
}

/// Ratio of the median (w = 1) or mean (w > 1) of the estimated ASD to the true ASD
/// for white Gaussian input, assuming nu = 2 * segments degrees of freedom per bin.
///   w = 1, one segment:  sqrt(ln 2)            (exact, chi2_2 median)
///   w = 1, K segments:   sqrt((1 - 2/(9 nu))^3) (Wilson-Hilferty median)
///   w > 1:               E[sqrt(chi2_nu / nu)] = sqrt(2/nu) Gamma((nu+1)/2) / Gamma(nu/2)
inline double asd_bias_factor(std::size_t segments, std::size_t smoothing) {
  const double nu = 2.0 * static_cast<double>(segments);
  if (smoothing > 1) return std::sqrt(2.0 / nu) * std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu));
  if (segments == 1) return std::sqrt(std::log(2.0));
  const double c = 1.0 - 2.0 / (9.0 * nu);
  return std::sqrt(c * c * c);
}

/// Bias-corrected median ASD over bins with f_min <= f <= f_max.
inline double noise_floor(const SpectrumEstimate& spectrum, double f_min, double f_max) {
  std::vector<double> band;
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    if (spectrum.frequency[i] >= f_min && spectrum.frequency[i] <= f_max) band.push_back(spectrum.asd[i]);
  if (band.empty()) throw NumericalError("noise_floor: no bins in the requested band");
  if (band.size() < 8) throw NumericalError("noise_floor: band holds fewer than 8 bins");
  return detail::median(std::move(band)) / asd_bias_factor(spectrum.segments, spectrum.smoothing);
}

namespace detail {
inline std::size_t nearest_bin(const SpectrumEstimate& s, double f0, std::size_t half_width) {
  if (s.size() == 0) throw DomainError("empty spectrum");
  const double lo = s.frequency.front() - static_cast<double>(half_width) * s.resolution;
  const double hi = s.frequency.back() + static_cast<double>(half_width) * s.resolution;
  if (!(f0 >= lo && f0 <= hi)) throw DomainError("peak frequency outside the spectrum grid");
  const double idx = std::round(f0 / s.resolution) - 1.0;
  return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(s.size() - 1)));
}
}  // namespace detail

/// Largest ASD value within +-half_width bins of f0. On a spectrum smoothed with
/// width w an isolated single-bin peak reads h / w.
inline double peak_asd(const SpectrumEstimate& spectrum, double f0, std::size_t half_width) {
  const std::size_t c = detail::nearest_bin(spectrum, f0, half_width);
  const std::size_t a = c >= half_width ? c - half_width : 0;
  const std::size_t b = std::min(spectrum.size() - 1, c + half_width);
  return *std::max_element(spectrum.asd.begin() + a, spectrum.asd.begin() + b + 1);
}

/// Sinusoid amplitude from the power in +-half_width bins around f0:
///   a = sqrt(2 (sum PSD df - background)),
/// background = bias-corrected median PSD of 32 bins on each side times the bin count.
inline double peak_amplitude(const SpectrumEstimate& spectrum, double f0, std::size_t half_width) {
  if (spectrum.smoothing != 1) throw DomainError("peak_amplitude needs an unsmoothed spectrum");
  const std::size_t c = detail::nearest_bin(spectrum, f0, half_width);
  const std::size_t n = spectrum.size();
  const std::size_t a = c >= half_width ? c - half_width : 0;
  const std::size_t b = std::min(n - 1, c + half_width);
  double power = 0.0;
  for (std::size_t i = a; i <= b; ++i) power += spectrum.asd[i] * spectrum.asd[i];

  constexpr std::size_t side = 32;
  std::vector<double> bg;
  for (std::size_t i = (a > side + 1 ? a - side - 1 : 0); i + 1 < a; ++i) bg.push_back(spectrum.asd[i] * spectrum.asd[i]);
  for (std::size_t i = b + 2; i < std::min(n, b + 2 + side); ++i) bg.push_back(spectrum.asd[i] * spectrum.asd[i]);
  double background = 0.0;
  if (bg.size() >= 8) {
    const double f = asd_bias_factor(spectrum.segments, 1);
    background = detail::median(std::move(bg)) / (f * f) * static_cast<double>(b - a + 1);
  }
  return std::sqrt(2.0 * std::max(0.0, (power - background) * spectrum.resolution));
}

/// Tilt ASD to phase ASD: multiplies by sqrt(2) k0 L.
inline SpectrumEstimate phase_scale(const SpectrumEstimate& spectrum, const Geometry& geom, const BeamParams& beam) {
  SpectrumEstimate out = spectrum;
  const double s = phase_from_tilt(1.0, geom, beam);
  for (double& v : out.asd) v *= s;
  out.unit = "rad/sqrt(Hz) phase";
  return out;
}

}  // namespace iwv
