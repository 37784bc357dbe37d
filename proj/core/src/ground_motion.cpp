#include "seismon/ground_motion.hpp"

#include "seismon/error.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace seismon {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Uniform in [0, 1) from the top 53 bits, independent of the standard
// library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double variance(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(x.size());
}

}  // namespace

void GroundMotionSpec::validate() const {
  if (!(g0 > 0.0)) throw ValidationError("G0 must be positive");
  if (!(omega_g > 0.0)) throw ValidationError("omega_g must be positive");
  if (!(xi_g > 0.0 && xi_g < 1.0)) throw ValidationError("xi_g must lie in (0, 1)");
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  if (!(duration > 0.0)) throw ValidationError("duration must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
}

std::size_t GroundMotionSpec::samples() const {
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

double kanai_tajimi_psd(double omega, const GroundMotionSpec& spec) {
  const double r2 = (omega / spec.omega_g) * (omega / spec.omega_g);
  const double damping = 4.0 * spec.xi_g * spec.xi_g * r2;
  return spec.g0 * (1.0 + damping) / ((1.0 - r2) * (1.0 - r2) + damping);
}

double modulating(double t, double alpha) { return t * std::exp(-alpha * t); }

GroundMotionSpec peak_intensity(const GroundMotionSpec& spec) {
  spec.validate();
  const double peak = modulating(std::min(1.0 / spec.alpha, spec.duration), spec.alpha);
  GroundMotionSpec out = spec;
  out.g0 *= peak * peak;
  return out;
}

Record generate_realization(const GroundMotionSpec& spec, std::uint64_t seed, Envelope envelope) {
  spec.validate();
  if (kPi / spec.dt < 3.0 * spec.omega_g)
    throw ValidationError("dt too coarse: Nyquist frequency must be at least 3*omega_g");

  const std::size_t n = spec.samples();
  const std::size_t length = next_pow2(2 * n);
  const double dw = 2.0 * kPi / (static_cast<double>(length) * spec.dt);

  std::mt19937_64 rng(seed);
  std::vector<std::complex<double>> spectrum(length, {0.0, 0.0});
  for (std::size_t k = 1; k < length / 2; ++k) {
    const double amplitude = 2.0 * std::sqrt(kanai_tajimi_psd(static_cast<double>(k) * dw, spec) * dw);
    spectrum[k] = std::polar(amplitude, 2.0 * kPi * uniform01(rng));
  }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<std::complex<double>> series;
  fft.inv(series, spectrum);

  Record out;
  out.dt = spec.dt;
  out.units = Units::acceleration;
  out.channel = "ground";
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * spec.dt;
    const double scale = envelope == Envelope::modulated ? modulating(t, spec.alpha) : 1.0;
    out.samples[i] = scale * series[i].real();
  }
  return out;
}

std::vector<double> fourier_amplitude(const std::vector<double>& samples) {
  if (samples.empty()) return {};
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, samples);
  std::vector<double> out(samples.size() / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(spectrum[k]);
  return out;
}

G0Calibrator::G0Calibrator(const Record& measured, const GroundMotionSpec& shape,
                           const CalibrationSettings& settings)
    : settings_(settings) {
  measured.validate();
  require_units(measured, Units::acceleration);
  if (measured.size() < 8) throw ValidationError("measured record is too short to calibrate");
  if (settings.ensemble_size < 2) throw ValidationError("ensemble_size must be at least 2");
  if (!(settings.coverage_target > 0.0 && settings.coverage_target <= 1.0))
    throw ValidationError("coverage_target must lie in (0, 1]");
  if (!(settings.g0_min > 0.0 && settings.g0_max > settings.g0_min))
    throw ValidationError("G0 bracket must satisfy 0 < g0_min < g0_max");

  GroundMotionSpec unit = shape;
  unit.g0 = 1.0;
  unit.dt = measured.dt;
  unit.duration = measured.duration();
  unit.validate();
  if (unit.duration * unit.omega_g < 2.0 * kPi * 3.0)
    throw ValidationError("measured record must span several cycles of omega_g");

  const std::vector<double> amplitude = fourier_amplitude(measured.samples);
  // Band [0, Nyquist/2]: bins with omega_k = 2 pi k / (N dt) <= pi / (2 dt).
  const std::size_t band = measured.size() / 4 + 1;
  measured_.assign(amplitude.begin(), amplitude.begin() + static_cast<std::ptrdiff_t>(band));
  silent_ = std::all_of(measured.samples.begin(), measured.samples.end(), [](double v) { return v == 0.0; });

  std::vector<double> sum(band, 0.0), sum_sq(band, 0.0);
  double ensemble_var = 0.0;
  for (int r = 0; r < settings.ensemble_size; ++r) {
    const Record realization =
        generate_realization(unit, settings.base_seed + static_cast<std::uint64_t>(r), settings.envelope);
    ensemble_var += variance(realization.samples);
    const std::vector<double> a = fourier_amplitude(realization.samples);
    for (std::size_t k = 0; k < band; ++k) {
      sum[k] += a[k];
      sum_sq[k] += a[k] * a[k];
    }
  }
  const double count = settings.ensemble_size;
  mean_.resize(band);
  stddev_.resize(band);
  for (std::size_t k = 0; k < band; ++k) {
    mean_[k] = sum[k] / count;
    const double var = (sum_sq[k] - count * mean_[k] * mean_[k]) / (count - 1.0);
    stddev_[k] = std::sqrt(std::max(var, 0.0));
  }
  ensemble_var /= count;
  variance_ratio_ = ensemble_var > 0.0 ? variance(measured.samples) / ensemble_var : 0.0;
}

double G0Calibrator::coverage(double g0) const {
  // A silent record is explained by the vanishing process (the band
  // collapses onto zero as G0 -> 0).
  if (silent_) return 1.0;
  const double s = std::sqrt(g0);
  std::size_t inside = 0;
  for (std::size_t k = 0; k < measured_.size(); ++k) {
    const double lo = s * (mean_[k] - 2.0 * stddev_[k]);
    const double hi = s * (mean_[k] + 2.0 * stddev_[k]);
    if (measured_[k] >= lo && measured_[k] <= hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(measured_.size());
}

CalibrationResult G0Calibrator::calibrate() const {
  CalibrationResult result;
  const double target = settings_.coverage_target;
  double best = 0.0;
  auto covers = [&](double g0) {
    ++result.evaluations;
    const double c = coverage(g0);
    best = std::max(best, c);
    return c >= target;
  };

  if (covers(settings_.g0_min)) {
    result.g0 = settings_.g0_min;
    result.coverage = coverage(result.g0);
    return result;
  }

  double guess = std::clamp(variance_ratio_, settings_.g0_min, settings_.g0_max);
  double lo = settings_.g0_min;
  double hi = guess;
  if (covers(guess)) {
    // Walk down until the target is lost.
    while (hi / 2.0 > settings_.g0_min && covers(hi / 2.0)) hi /= 2.0;
    lo = std::max(hi / 2.0, settings_.g0_min);
  } else {
    lo = guess;
    hi = guess;
    do {
      lo = hi;
      hi *= 2.0;
      if (hi > settings_.g0_max)
        throw CalibrationError("coverage target unreachable within the G0 bracket", best);
    } while (!covers(hi));
  }

  while (hi / lo > 1.0 + 1e-6) {
    const double mid = std::sqrt(lo * hi);
    if (covers(mid)) hi = mid;
    else lo = mid;
  }
  result.g0 = hi;
  result.coverage = coverage(hi);
  return result;
}

CalibrationResult calibrate_g0(const Record& measured, const GroundMotionSpec& shape,
                               const CalibrationSettings& settings) {
  return G0Calibrator(measured, shape, settings).calibrate();
}

void NoiseSpec::validate() const {
  if (!(rms_ratio >= 0.0) || !std::isfinite(rms_ratio))
    throw ValidationError("noise rms_ratio must be non-negative");
}

double noise_psd(const Record& signal, const NoiseSpec& noise) {
  noise.validate();
  signal.validate();
  if (signal.samples.empty()) throw ValidationError("noise_psd needs a non-empty signal");
  const double sigma = noise.rms_ratio * signal.rms();
  return sigma * sigma * signal.dt / (2.0 * kPi);
}

std::vector<double> white_noise(double density, double dt, std::size_t count, std::uint64_t seed) {
  if (density < 0.0) throw ValidationError("noise density must be non-negative");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  std::vector<double> out(count, 0.0);
  if (density == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 * kPi * density / dt));
  for (double& v : out) v = normal(rng);
  return out;
}

}  // namespace seismon
