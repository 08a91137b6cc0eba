// iwvtilt: command-line front end for the inverse-weak-value tilt meter toolkit.
//
// Every subcommand writes plot data as CSV (to --out, or stdout) and a short
// text summary (stdout, or stderr when the CSV goes to stdout).
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "iwv/iwv.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Experimental defaults: 780 nm laser, 4 sigma ~ 1 mm beam, L ~ 2 cm,
// dark/bright power ratio 8.8, 1.2 mW, 1 kHz acquisition of a 10 min record.
struct RunConfig {
  double lambda_nm = 780.0;
  double sigma_mm = 0.25;
  double L_cm = 2.0;
  std::optional<double> k_sigma;
  std::optional<double> power_ratio;
  std::optional<double> phi;
  std::optional<double> theta;
  double power_mw = 1.2;
  double fs_hz = 1000.0;
  double duration_s = 600.0;
  std::uint64_t seed = 1;
  std::size_t smooth_w = 5;
  std::string out;

  // montecarlo
  double photons = 1e6;
  std::uint64_t trials = 200;
  // shift-scan
  double phi_max = 0.3;
  std::size_t points = 61;
  // regime
  double regime_lo = 0.3;
  double regime_hi = 3.0;
  // simulate / spectrum
  double tone_amp = 0.8e-9;
  double tone_hz = 30.0;
  double floor_asd = 200e-15;
  bool plateau = false;
  bool no_shot_noise = false;
  std::optional<double> filter_lo;
  std::optional<double> filter_hi;
  double gain = 1.0;
  std::size_t segments = 1;
  double band_lo = 5.0;
  double band_hi = 25.0;
};

struct Resolved {
  iwv::OperatingPoint op;
  double photon_rate;
};

// The caller supplies subcommand defaults for k*sigma and phi when neither
// alternative was given.
Resolved resolve(const RunConfig& c, std::optional<double> default_k_sigma, double default_phi) {
  if (c.k_sigma && c.power_ratio) throw iwv::DomainError("give only one of --k-sigma and --power-ratio");
  if (c.phi && c.theta) throw iwv::DomainError("give only one of --phi and --theta-rad");
  const iwv::BeamParams beam(c.sigma_mm * 1e-3, c.lambda_nm * 1e-9);
  double k;
  if (c.k_sigma) {
    k = *c.k_sigma / beam.sigma();
  } else if (c.power_ratio || !default_k_sigma) {
    k = iwv::misalignment_from_power_ratio(c.power_ratio.value_or(8.8), beam.sigma());
  } else {
    k = *default_k_sigma / beam.sigma();
  }
  const iwv::Geometry geom(c.L_cm * 1e-2, k);
  const auto op = c.theta ? iwv::OperatingPoint(beam, geom, *c.theta)
                          : iwv::OperatingPoint::from_phase(beam, geom, c.phi.value_or(default_phi));
  if (!(c.power_mw > 0.0)) throw iwv::DomainError("--power-mw must be positive");
  return {op, iwv::photons_per_second(c.power_mw * 1e-3, beam.lambda())};
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw iwv::DomainError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& csv() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  std::ostream& summary() { return file_.is_open() ? std::cout : std::cerr; }

private:
  std::ofstream file_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<std::string> op_comments(const Resolved& r) {
  const auto& op = r.op;
  return {"lambda_m=" + iwv::csv::format_number(op.beam().lambda()) +
              ", sigma_m=" + iwv::csv::format_number(op.sigma()) +
              ", L_m=" + iwv::csv::format_number(op.geometry().separation()),
          "k_rad_per_m=" + iwv::csv::format_number(op.k()) + ", k_sigma=" + iwv::csv::format_number(op.k_sigma()) +
              ", phi_rad=" + iwv::csv::format_number(op.phi()) +
              ", theta_rad=" + iwv::csv::format_number(op.theta())};
}

int cmd_profile(const RunConfig& c) {
  const auto r = resolve(c, 0.2, 0.05);
  const double k = r.op.k(), sigma = r.op.sigma(), phi = r.op.phi();
  const auto norm_density = [&](double z, double p) {
    const double mass = 4.0 * std::sqrt(2.0 * iwv::pi) * sigma * iwv::postselection_probability_exact(p, k, sigma);
    if (!(mass > 0.0)) throw iwv::NoLightError("dark port receives no light");
    return sigma * iwv::darkport_intensity(z, p, k, sigma) / mass;
  };
  iwv::csv::Table t;
  t.comments = op_comments(r);
  t.comments.push_back("densities normalized to unit area over z/sigma");
  t.header = {"z_over_sigma", "input_gaussian", "density_phi0", "density_phi"};
  constexpr std::size_t n = 4096;
  const double a = iwv::quadrature_half_width_sigmas;
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = -a + 2.0 * a * static_cast<double>(i) / (n - 1);
    const double z = u * sigma;
    const double g = std::exp(-0.5 * u * u) / std::sqrt(2.0 * iwv::pi);
    const double d = norm_density(z, phi);
    t.rows.push_back({u, g, norm_density(z, 0.0), d});
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    m0 += w * d;
    m1 += w * u * d;
  }
  Output out(c.out);
  iwv::csv::write(out.csv(), t);
  auto& s = out.summary();
  s << "profile: k*sigma=" << num(r.op.k_sigma()) << " phi=" << num(phi) << " rad\n"
    << "  mean from emitted samples  <z>/sigma = " << num(m1 / m0) << "\n"
    << "  closed form                <z>/sigma = " << num(iwv::mean_shift_exact(phi, k, sigma) / sigma) << "\n";
  if (k != 0.0) s << "  small-signal 2 phi/k       <z>/sigma = " << num(iwv::mean_shift_approx(phi, k) / sigma) << "\n";
  return 0;
}

int cmd_shift_scan(const RunConfig& c) {
  const auto r = resolve(c, 0.2, 0.0);
  const double k = r.op.k(), sigma = r.op.sigma();
  if (c.points < 2) throw iwv::DomainError("--points must be at least 2");
  iwv::csv::Table t;
  t.comments = op_comments(r);
  t.header = {"phi_rad",   "mean_exact_over_sigma", "mean_quantum_over_sigma", "mean_approx_over_sigma",
              "prob_weak", "prob_exact",            "kappa"};
  for (std::size_t i = 0; i < c.points; ++i) {
    const double phi = c.phi_max * static_cast<double>(i) / static_cast<double>(c.points - 1);
    const double kappa = iwv::regime_classify(phi, k, sigma, {c.regime_lo, c.regime_hi}).kappa;
    t.rows.push_back({phi, iwv::mean_shift_exact(phi, k, sigma) / sigma, iwv::quantum_mean_shift(phi, k, sigma) / sigma,
                      iwv::mean_shift_approx(phi, k) / sigma, iwv::postselection_probability(phi, k, sigma),
                      iwv::postselection_probability_exact(phi, k, sigma), kappa});
  }
  Output out(c.out);
  iwv::csv::write(out.csv(), t);
  out.summary() << "shift-scan: " << c.points << " phases in [0, " << num(c.phi_max) << "] rad at k*sigma=" << num(r.op.k_sigma())
                << "\n";
  return 0;
}

int cmd_regime(const RunConfig& c) {
  const auto r = resolve(c, 0.2, 0.05);
  const double k = r.op.k(), sigma = r.op.sigma(), phi = r.op.phi();
  const auto rep = iwv::regime_classify(phi, k, sigma, {c.regime_lo, c.regime_hi});
  Output out(c.out);
  if (!c.out.empty()) {
    iwv::csv::Table t;
    t.comments = op_comments(r);
    t.comments.push_back("regime_code: 0=IWVA 1=WVA 2=INTERMEDIATE");
    t.header = {"phi_rad", "k_sigma", "kappa", "regime_code"};
    t.rows.push_back({phi, r.op.k_sigma(), rep.kappa, static_cast<double>(static_cast<int>(rep.label))});
    iwv::csv::write(out.csv(), t);
  }
  auto& s = c.out.empty() ? std::cout : out.summary();
  s << "regime: " << iwv::to_string(rep.label) << "\n"
    << "  kappa = k*sigma*|sigma_w| = " << num(rep.kappa) << "  (WVA <= " << num(rep.thresholds.lo)
    << ", IWVA >= " << num(rep.thresholds.hi) << ")\n"
    << "  phi = " << num(phi) << " rad, k*sigma = " << num(r.op.k_sigma()) << "\n";
  if (std::sin(0.5 * phi) != 0.0) s << "  weak value sigma_w = " << num(iwv::weak_value(phi).imag()) << " i\n";
  s << "  P (weak interaction) = " << num(iwv::postselection_probability(phi, k, sigma))
    << ", P (exact) = " << num(iwv::postselection_probability_exact(phi, k, sigma)) << "\n"
    << "  <z>/sigma exact = " << num(iwv::mean_shift_exact(phi, k, sigma) / sigma)
    << ", quantum = " << num(iwv::quantum_mean_shift(phi, k, sigma) / sigma) << "\n";
  return 0;
}

int cmd_montecarlo(const RunConfig& c) {
  const auto r = resolve(c, 0.2, 1e-3);
  if (!(c.photons >= 1.0)) throw iwv::DomainError("--photons must be at least 1");
  iwv::MonteCarloConfig cfg{r.op, static_cast<std::uint64_t>(std::llround(c.photons)), c.trials, c.seed};
  const auto rep = iwv::run_trials(cfg);
  iwv::csv::Table t;
  t.comments = op_comments(r);
  t.comments.push_back("photons_per_trial=" + std::to_string(cfg.photons) + ", trials=" + std::to_string(cfg.trials) +
                       ", seed=" + std::to_string(rep.seed));
  t.header = {"trial", "phi_hat", "theta_hat"};
  for (std::size_t i = 0; i < rep.trials.size(); ++i)
    t.rows.push_back({static_cast<double>(i), rep.trials[i].phi_hat, rep.trials[i].theta_hat});
  Output out(c.out);
  iwv::csv::write(out.csv(), t);
  out.summary() << "montecarlo: " << cfg.trials << " trials x " << cfg.photons << " photons, seed " << rep.seed << "\n"
                << "  mean detected per trial   " << num(rep.mean_detected) << "\n"
                << "  mean phi_hat              " << num(rep.mean_phi_hat) << " rad (true " << num(r.op.phi()) << ")\n"
                << "  std  phi_hat              " << num(rep.std_phi_hat) << " rad\n"
                << "  shot-noise sqrt(pi/2)/sqrt(N) " << num(rep.theory_phi) << " rad\n"
                << "  ratio empirical/theory    " << num(rep.ratio) << "\n"
                << "  std  theta_hat            " << num(rep.std_theta_hat) << " rad (theory "
                << num(rep.theory_theta) << ")\n";
  return 0;
}

// Two-plateau low-frequency noise: ~7 nrad/rtHz at 10 uHz falling to a
// 70 prad/rtHz plateau over 2-100 mHz, then down to the 200 frad/rtHz floor above 2 Hz.
iwv::NoiseSpec noise_spec(const RunConfig& c) {
  iwv::NoiseSpec spec;
  spec.white_floor = c.floor_asd;
  if (c.plateau) spec.anchors = {{1e-5, 7e-9}, {2e-3, 70e-12}, {0.1, 70e-12}, {2.0, 1e-15}};
  return spec;
}

iwv::TimeSeries synthesize(const RunConfig& c, const Resolved& r) {
  const std::size_t n = iwv::sample_count(c.fs_hz, c.duration_s);
  auto tilt = iwv::sine_tilt(c.tone_amp, c.tone_hz, c.fs_hz, c.duration_s);
  tilt = iwv::add(tilt, iwv::colored_noise(noise_spec(c), n, c.fs_hz, c.seed));
  const double rate = c.no_shot_noise ? std::numeric_limits<double>::infinity() : r.photon_rate;
  auto det = iwv::simulate_detector_series(tilt, r.op, rate, c.seed + 1);
  det.seed = c.seed;
  if (c.filter_hi || c.filter_lo) {
    iwv::FilterSpec f{c.filter_lo, c.filter_hi.value_or(300.0), c.gain};
    det = iwv::apply_filter(det, f);
    for (double& v : det.samples) v /= c.gain;  // back to tilt-equivalent
  }
  return det;
}

int cmd_simulate(const RunConfig& c) {
  const auto r = resolve(c, std::nullopt, 0.0);
  const auto ts = synthesize(c, r);
  Output out(c.out);
  auto extra = op_comments(r);
  extra.push_back("tone_amp_rad=" + iwv::csv::format_number(c.tone_amp) + ", tone_hz=" + iwv::csv::format_number(c.tone_hz) +
                  ", floor_asd=" + iwv::csv::format_number(c.floor_asd) + ", plateau=" + (c.plateau ? "1" : "0") +
                  ", shot_noise=" + (c.no_shot_noise ? "0" : "1"));
  iwv::csv::write(out.csv(), iwv::csv::to_table(ts, extra));
  out.summary() << "simulate: " << ts.size() << " samples at " << num(ts.sample_rate) << " Hz\n";
  return 0;
}

int cmd_spectrum(const RunConfig& c) {
  const auto r = resolve(c, std::nullopt, 0.0);
  const auto ts = synthesize(c, r);
  const auto raw = c.segments <= 1
                       ? iwv::periodogram_asd(ts, iwv::Window::Rectangular)
                       : iwv::averaged_asd(ts, ts.size() / c.segments, 0, iwv::Window::Hann);
  const auto smoothed = iwv::moving_average_smooth(raw, c.smooth_w);
  const auto phase = iwv::phase_scale(smoothed, r.op.geometry(), r.op.beam());
  const double floor = iwv::noise_floor(raw, c.band_lo, c.band_hi);
  const double line = iwv::shot_noise_tilt(r.photon_rate, r.op.beam().lambda(), r.op.geometry().separation());
  const double phase_per_tilt = iwv::phase_from_tilt(1.0, r.op.geometry(), r.op.beam());

  Output out(c.out);
  auto extra = op_comments(r);
  extra.push_back("noise_floor_rad_rthz=" + iwv::csv::format_number(floor) +
                  ", shot_noise_line_rad_rthz=" + iwv::csv::format_number(line));
  iwv::csv::write(out.csv(), iwv::csv::to_table(smoothed, phase, extra));

  auto& s = out.summary();
  s << "spectrum: " << raw.size() << " bins, df = " << num(raw.resolution) << " Hz, window "
    << iwv::to_string(raw.window) << ", segments " << raw.segments << ", smoothing w=" << c.smooth_w << "\n"
    << "  noise floor [" << num(c.band_lo) << ", " << num(c.band_hi) << "] Hz: " << num(floor) << " rad/rtHz ("
    << num(floor * phase_per_tilt) << " rad/rtHz phase)\n";
  if (c.tone_hz > 0.0 && c.tone_amp != 0.0) {
    s << "  tone at " << num(c.tone_hz) << " Hz: amplitude " << num(iwv::peak_amplitude(raw, c.tone_hz, 2))
      << " rad (injected " << num(c.tone_amp) << ")"
      << ", smoothed peak ASD " << num(iwv::peak_asd(smoothed, c.tone_hz, 2)) << " rad/rtHz\n";
  }
  s << "  shot-noise line lambda/(4 sqrt(pi) L sqrt(N)) = " << num(line) << " rad/rtHz ("
    << num(line * phase_per_tilt) << " rad/rtHz phase), N = " << num(r.photon_rate) << " photons/s\n"
    << "  note: the commonly quoted sensitivity for the same parameters is 56e-15 rad/rtHz;"
       " the ~sqrt(2) gap is unresolved (L vs L/sqrt(2))\n";
  if (!c.no_shot_noise)
    s << "  expected white floor incl. shot noise: "
      << num(std::hypot(c.floor_asd, line)) << " rad/rtHz\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse-weak-value tilt meter: closed forms, Monte Carlo and spectra"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "Config file: 'key = value' lines, '#' comments; flags override");

  RunConfig c;
  app.add_option("--lambda-nm", c.lambda_nm, "Wavelength in nm (setup: 780 nm diode laser)")->capture_default_str();
  app.add_option("--sigma-mm", c.sigma_mm, "Beam sigma in mm; diameter 4 sigma (setup: ~1 mm diameter)")
      ->capture_default_str();
  app.add_option("--L-cm", c.L_cm, "Beam separation parameter L in cm (setup: ~2.0 cm)")->capture_default_str();
  auto* ks = app.add_option("--k-sigma", c.k_sigma, "Misalignment k*sigma (profile/regime/shift-scan/montecarlo default 0.2)");
  auto* pr = app.add_option("--power-ratio", c.power_ratio,
                            "Bright/dark power ratio giving k (setup: 8.8; default for simulate/spectrum)");
  ks->excludes(pr);
  auto* ph = app.add_option("--phi", c.phi, "Interferometer phase in rad");
  auto* th = app.add_option("--theta-rad", c.theta, "Mirror tilt in rad (phi = sqrt(2) k0 L theta)");
  ph->excludes(th);
  app.add_option("--power-mw", c.power_mw, "Optical power into the interferometer in mW (setup: 1.2 mW)")
      ->capture_default_str();
  app.add_option("--fs-hz", c.fs_hz, "Sample rate in Hz (setup: 1 kHz acquisition)")->capture_default_str();
  app.add_option("--duration-s", c.duration_s, "Record length in s (setup: 10 min run)")->capture_default_str();
  app.add_option("--seed", c.seed, "PRNG seed")->capture_default_str();
  app.add_option("--smooth-w", c.smooth_w, "Moving-average width for plotted spectra (odd; default 5)")
      ->capture_default_str();
  app.add_option("--out", c.out, "CSV output path (default: stdout)");
  app.add_option("--photons", c.photons, "Photons sent per Monte Carlo trial")->capture_default_str();
  app.add_option("--trials", c.trials, "Monte Carlo trials")->capture_default_str();
  app.add_option("--phi-max", c.phi_max, "Largest phase of the shift scan")->capture_default_str();
  app.add_option("--points", c.points, "Number of phases in the shift scan")->capture_default_str();
  app.add_option("--regime-lo", c.regime_lo, "kappa at or below which the regime is WVA")->capture_default_str();
  app.add_option("--regime-hi", c.regime_hi, "kappa at or above which the regime is IWVA")->capture_default_str();
  app.add_option("--tone-amp-rad", c.tone_amp, "Reference tilt amplitude in rad (1.6 nrad peak-to-peak)")
      ->capture_default_str();
  app.add_option("--tone-hz", c.tone_hz, "Reference tilt frequency in Hz (setup: 30 Hz)")->capture_default_str();
  app.add_option("--floor-asd", c.floor_asd, "White tilt-noise floor in rad/rtHz (measured: 200e-15 above 2 Hz)")
      ->capture_default_str();
  app.add_flag("--plateau", c.plateau, "Add the low-frequency noise shape (70 prad/rtHz plateau at 2-100 mHz)");
  app.add_flag("--no-shot-noise", c.no_shot_noise, "Disable detector shot noise");
  app.add_option("--filter-lo-hz", c.filter_lo, "High-pass corner of the preamp model in Hz (setup: 0.03)");
  app.add_option("--filter-hi-hz", c.filter_hi, "Low-pass corner of the preamp model in Hz (setup: 300)");
  app.add_option("--gain", c.gain, "Preamp gain (setup: 100)")->capture_default_str();
  app.add_option("--segments", c.segments, "Averaged segments for the spectrum (1: single periodogram)")
      ->capture_default_str();
  app.add_option("--band-lo-hz", c.band_lo, "Noise-floor band lower edge in Hz")->capture_default_str();
  app.add_option("--band-hi-hz", c.band_hi, "Noise-floor band upper edge in Hz")->capture_default_str();

  auto* profile = app.add_subcommand("profile", "Dark-port transverse distributions (bimodal profile)");
  auto* shift = app.add_subcommand("shift-scan", "phi -> <z> table from the classical and quantum forms");
  auto* regime = app.add_subcommand("regime", "IWVA / WVA classification of an operating point");
  auto* mc = app.add_subcommand("montecarlo", "Photon-counting split-detector Monte Carlo");
  auto* sim = app.add_subcommand("simulate", "Detector time series CSV");
  auto* spec = app.add_subcommand("spectrum", "Tilt and phase amplitude spectral densities");
  for (auto* s : {profile, shift, regime, mc, sim, spec}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*profile) return cmd_profile(c);
    if (*shift) return cmd_shift_scan(c);
    if (*regime) return cmd_regime(c);
    if (*mc) return cmd_montecarlo(c);
    if (*sim) return cmd_simulate(c);
    if (*spec) return cmd_spectrum(c);
  } catch (const iwv::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const iwv::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
