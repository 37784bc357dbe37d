#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "seismon/error.hpp"
#include "seismon/ground_motion.hpp"

#include <cmath>
#include <numbers>

using namespace seismon;

namespace {

constexpr double kPi = std::numbers::pi;

GroundMotionSpec stationary_spec() { return fixture::northridge_like(0.02, 40.95, 0.01); }

double ensemble_rms(const GroundMotionSpec& spec, std::uint64_t first_seed, int count) {
  double acc = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < count; ++r) {
    const Record rec = generate_realization(spec, first_seed + static_cast<std::uint64_t>(r), Envelope::stationary);
    for (double v : rec.samples) acc += v * v;
    n += rec.size();
  }
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace

TEST_CASE("Kanai-Tajimi PSD closed-form values") {
  GroundMotionSpec spec = fixture::northridge_like(2.5);
  CHECK(kanai_tajimi_psd(0.0, spec) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(kanai_tajimi_psd(spec.omega_g, spec) == doctest::Approx(2.5 * 1.49 / 0.49).epsilon(1e-14));
  CHECK(kanai_tajimi_psd(spec.omega_g, spec) / 2.5 == doctest::Approx(3.0408).epsilon(1e-4));
  CHECK(kanai_tajimi_psd(100.0 * spec.omega_g, spec) < 1e-3 * 2.5);
}

TEST_CASE("Kanai-Tajimi PSD is even, non-negative and linear in G0") {
  GroundMotionSpec a = fixture::northridge_like(1.0);
  GroundMotionSpec b = a;
  b.g0 = 3.0;
  double ia = 0.0, ib = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double w = 0.01 * i;
    CHECK(kanai_tajimi_psd(w, a) == kanai_tajimi_psd(-w, a));
    CHECK(kanai_tajimi_psd(w, a) >= 0.0);
    ia += kanai_tajimi_psd(w, a);
    ib += kanai_tajimi_psd(w, b);
  }
  CHECK(std::isfinite(ia));
  CHECK(ib == doctest::Approx(3.0 * ia).epsilon(1e-12));
}

TEST_CASE("modulating function") {
  CHECK(modulating(0.0, 0.12) == 0.0);
  const double peak = 1.0 / 0.12;
  CHECK(peak == doctest::Approx(8.333).epsilon(1e-3));
  CHECK(modulating(peak, 0.12) == doctest::Approx(std::exp(-1.0) / 0.12).epsilon(1e-15));
  CHECK(modulating(peak - 1e-3, 0.12) < modulating(peak, 0.12));
  CHECK(modulating(peak + 1e-3, 0.12) < modulating(peak, 0.12));
}

TEST_CASE("peak intensity scales G0 by the squared envelope maximum") {
  const GroundMotionSpec spec = fixture::northridge_like(0.02, 30.0, 0.01);
  const GroundMotionSpec peak = peak_intensity(spec);
  double brute = 0.0;
  for (std::size_t i = 0; i < spec.samples(); ++i) brute = std::max(brute, modulating(i * spec.dt, spec.alpha));
  CHECK(peak.g0 == doctest::Approx(0.02 * brute * brute).epsilon(1e-6));
  CHECK(peak.omega_g == spec.omega_g);

  // Records shorter than 1/alpha peak at their end.
  const GroundMotionSpec short_spec = fixture::northridge_like(0.02, 5.0, 0.01);
  CHECK(peak_intensity(short_spec).g0 == doctest::Approx(0.02 * std::pow(modulating(5.0, 0.12), 2)).epsilon(1e-12));
}

TEST_CASE("realizations are deterministic in the seed") {
  const auto spec = fixture::northridge_like();
  const Record a = generate_realization(spec, 42);
  const Record b = generate_realization(spec, 42);
  const Record c = generate_realization(spec, 43);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK(a.size() == spec.samples());
  CHECK(a.units == Units::acceleration);
  CHECK(a.samples.front() == 0.0);  // I(0) = 0
}

TEST_CASE("Nyquist violation is rejected") {
  auto spec = fixture::northridge_like();
  spec.dt = 0.06;  // pi/dt = 52 < 3*6pi = 56.5
  CHECK_THROWS_AS(generate_realization(spec, 1), ValidationError);
  spec.dt = 0.05;
  CHECK_NOTHROW(generate_realization(spec, 1));
}

TEST_CASE("invalid spec fields are rejected") {
  auto spec = fixture::northridge_like();
  spec.xi_g = 1.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = fixture::northridge_like();
  spec.g0 = 0.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = fixture::northridge_like();
  spec.alpha = -1.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("stationary ensemble periodogram matches the target PSD") {
  const GroundMotionSpec spec = stationary_spec();
  const int realizations = 500;
  const std::size_t n = 4096;
  std::vector<double> average(n / 2 + 1, 0.0);
  for (int r = 0; r < realizations; ++r) {
    const Record rec = generate_realization(spec, 1000 + static_cast<std::uint64_t>(r), Envelope::stationary);
    REQUIRE(rec.size() == n);
    std::vector<std::complex<double>> x(rec.samples.begin(), rec.samples.end());
    const auto spectrum = oracle::fft(x);
    // Two-sided periodogram: E[.] -> S(omega) as N -> infinity.
    for (std::size_t k = 0; k <= n / 2; ++k)
      average[k] += spec.dt / (2.0 * kPi * static_cast<double>(n)) * std::norm(spectrum[k]) / realizations;
  }
  const double dw = 2.0 * kPi / (static_cast<double>(n) * spec.dt);
  // Nine-bin smoothing on both sides keeps the per-point sampling error near 1.5%.
  int checked = 0;
  for (std::size_t k = 4; k + 4 <= n / 2; ++k) {
    const double w = static_cast<double>(k) * dw;
    if (w < 0.2 * spec.omega_g || w > 3.0 * spec.omega_g) continue;
    double est = 0.0, target = 0.0;
    for (std::size_t j = k - 4; j <= k + 4; ++j) {
      est += average[j];
      target += kanai_tajimi_psd(static_cast<double>(j) * dw, spec);
    }
    CHECK(est == doctest::Approx(target).epsilon(0.10));
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("quadrupling G0 doubles the ensemble RMS") {
  GroundMotionSpec spec = fixture::northridge_like(0.01, 20.0, 0.01);
  const double base = ensemble_rms(spec, 1, 500);
  spec.g0 *= 4.0;
  const double scaled = ensemble_rms(spec, 5001, 500);
  CHECK(scaled / base == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("stationary realizations have zero mean") {
  const GroundMotionSpec spec = fixture::northridge_like(0.05, 20.0, 0.01);
  const int count = 400;
  const std::vector<std::size_t> times{10, 250, 777, 1200, 1999};
  std::vector<double> sum(times.size(), 0.0), sum_sq(times.size(), 0.0);
  for (int r = 0; r < count; ++r) {
    const Record rec = generate_realization(spec, 300 + static_cast<std::uint64_t>(r), Envelope::stationary);
    for (std::size_t i = 0; i < times.size(); ++i) {
      sum[i] += rec.samples[times[i]];
      sum_sq[i] += rec.samples[times[i]] * rec.samples[times[i]];
    }
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double mean = sum[i] / count;
    const double sigma = std::sqrt(sum_sq[i] / count - mean * mean);
    CHECK(std::abs(mean) <= 3.0 * sigma / std::sqrt(static_cast<double>(count)));
  }
}

TEST_CASE("calibration against a zero record returns the lower bracket") {
  Record zero;
  zero.dt = 0.01;
  zero.samples.assign(2001, 0.0);
  CalibrationSettings settings;
  settings.ensemble_size = 50;
  const auto result = calibrate_g0(zero, fixture::northridge_like(), settings);
  CHECK(result.g0 == settings.g0_min);
  CHECK(result.coverage >= settings.coverage_target);
}

TEST_CASE("coverage is non-decreasing in G0 up to saturation") {
  const auto spec = fixture::northridge_like(0.03, 30.0, 0.01);
  const Record measured = generate_realization(spec, 777);
  CalibrationSettings settings;
  settings.ensemble_size = 100;
  const G0Calibrator calibrator(measured, spec, settings);
  // Past saturation the lower band edge rises above small measured bins and
  // coverage falls again, so only the rising branch is checked.
  double previous = -1.0;
  int steps = 0;
  for (double g0 = 1e-4; previous < 0.95 && g0 < 10.0; g0 *= 1.25, ++steps) {
    const double c = calibrator.coverage(g0);
    CHECK(c >= previous);
    previous = c;
  }
  CHECK(previous >= 0.95);
  CHECK(steps > 10);
}

TEST_CASE("calibrated G0 is the smallest value meeting the target") {
  const auto spec = fixture::northridge_like(0.03, 30.0, 0.01);
  const Record measured = generate_realization(spec, 99);
  CalibrationSettings settings;
  settings.ensemble_size = 100;
  const G0Calibrator calibrator(measured, spec, settings);
  const auto result = calibrator.calibrate();
  CHECK(result.coverage >= 0.95);
  CHECK(calibrator.coverage(result.g0 / (1.0 + 1e-5)) < 0.95);
}

TEST_CASE("G0 round trip over 10 seeds") {
  const double g0_true = 0.03;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto spec = fixture::northridge_like(g0_true, 30.0, 0.01);
    const Record measured = generate_realization(spec, 10000 + seed);
    const auto result = calibrate_g0(measured, spec);
    CHECK(result.g0 / g0_true < 2.0);
    CHECK(result.g0 / g0_true > 0.5);
  }
}

TEST_CASE("doubling the measured amplitude increases the calibrated G0") {
  CalibrationSettings settings;
  settings.ensemble_size = 100;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto spec = fixture::northridge_like(0.03, 30.0, 0.01);
    Record measured = generate_realization(spec, 500 + seed);
    const double base = calibrate_g0(measured, spec, settings).g0;
    for (double& v : measured.samples) v *= 2.0;
    CHECK(calibrate_g0(measured, spec, settings).g0 > base);
  }
}

TEST_CASE("unreachable coverage reports the best achieved value") {
  const auto spec = fixture::northridge_like(1.0, 30.0, 0.01);
  const Record measured = generate_realization(spec, 3);
  CalibrationSettings settings;
  settings.ensemble_size = 50;
  settings.g0_max = 1e-3;
  try {
    calibrate_g0(measured, spec, settings);
    FAIL("expected a calibration failure");
  } catch (const CalibrationError& e) {
    CHECK(e.best_coverage() < 0.95);
    CHECK(e.kind() == ErrorKind::calibration);
  }
}

TEST_CASE("measurement noise density") {
  Record unit;
  unit.dt = 0.01;
  unit.samples.assign(1000, 1.0);
  CHECK(noise_psd(unit, NoiseSpec{0.0}) == 0.0);
  const double density = noise_psd(unit, NoiseSpec{0.02});
  // Variance over [-pi/dt, pi/dt].
  CHECK(density * 2.0 * kPi / unit.dt == doctest::Approx(4e-4).epsilon(1e-12));
  Record zero = unit;
  zero.samples.assign(1000, 0.0);
  CHECK(noise_psd(zero, NoiseSpec{0.02}) == 0.0);
  CHECK_THROWS_AS(noise_psd(unit, NoiseSpec{-0.1}), ValidationError);
}

TEST_CASE("white noise drawn at the returned density has the requested RMS ratio") {
  const auto spec = fixture::northridge_like(0.03, 30.0, 0.01);
  const Record signal = generate_realization(spec, 8);
  const double density = noise_psd(signal, NoiseSpec{0.02});
  const auto w = white_noise(density, signal.dt, 1000000, 17);
  double acc = 0.0;
  for (double v : w) acc += v * v;
  const double ratio = std::sqrt(acc / static_cast<double>(w.size())) / signal.rms();
  CHECK(ratio == doctest::Approx(0.02).epsilon(0.10));
}
