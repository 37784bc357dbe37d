#pragma once

#include "seismon/record.hpp"

#include <cstdint>
#include <vector>

namespace seismon {

/// Kanai-Tajimi process parameters. PSDs are two-sided throughout: the
/// process variance is the integral of S over (-inf, inf).
struct GroundMotionSpec {
  double g0 = 1.0;       // (m/s^2)^2 s
  double omega_g = 0.0;  // rad/s
  double xi_g = 0.0;
  double alpha = 0.0;  // 1/s, envelope decay
  double duration = 0.0;
  double dt = 0.0;

  void validate() const;
  std::size_t samples() const;
};

double kanai_tajimi_psd(double omega, const GroundMotionSpec& spec);

/// I(t) = t exp(-alpha t).
double modulating(double t, double alpha);

/// Spec with G0 scaled by max I(t)^2 over the record, the stationary
/// intensity matching the modulated process at its envelope peak.
GroundMotionSpec peak_intensity(const GroundMotionSpec& spec);

enum class Envelope { modulated, stationary };

/// Spectral-representation synthesis: cosines on a uniform frequency grid
/// below Nyquist with amplitudes 2*sqrt(S(w)*dw) and i.i.d. uniform phases,
/// evaluated by inverse FFT and optionally multiplied by I(t). The frequency
/// grid period is at least twice the record length. Deterministic in seed.
Record generate_realization(const GroundMotionSpec& spec, std::uint64_t seed,
                            Envelope envelope = Envelope::modulated);

struct CalibrationSettings {
  int ensemble_size = 200;
  double coverage_target = 0.95;
  Envelope envelope = Envelope::modulated;
  std::uint64_t base_seed = 1;
  double g0_min = 1e-10;
  double g0_max = 1e6;
};

struct CalibrationResult {
  double g0 = 0.0;
  double coverage = 0.0;
  int evaluations = 0;
};

/// Matches the measured record's Fourier amplitude against mean +/- 2 std of
/// an ensemble of synthetic realizations. Realizations scale with sqrt(G0),
/// so the ensemble is generated once at unit G0 and rescaled.
class G0Calibrator {
 public:
  G0Calibrator(const Record& measured, const GroundMotionSpec& shape,
               const CalibrationSettings& settings = {});

  /// Fraction of frequency bins in [0, Nyquist/2] where |FFT(measured)|
  /// falls inside mean +/- 2 std of the ensemble scaled to `g0`. An
  /// all-zero record has coverage 1 at every G0.
  double coverage(double g0) const;

  /// Smallest G0 (to bisection tolerance) reaching the coverage target.
  /// Throws CalibrationError if the target is not reachable in the bracket.
  CalibrationResult calibrate() const;

  const std::vector<double>& measured_amplitude() const { return measured_; }

 private:
  CalibrationSettings settings_;
  std::vector<double> measured_;
  std::vector<double> mean_;
  std::vector<double> stddev_;
  double variance_ratio_ = 0.0;  // var(measured) / var(unit ensemble)
  bool silent_ = false;          // measured record is identically zero
};

CalibrationResult calibrate_g0(const Record& measured, const GroundMotionSpec& shape,
                               const CalibrationSettings& settings = {});

struct NoiseSpec {
  double rms_ratio = 0.02;
  void validate() const;
};

/// Flat two-sided density whose variance over [-pi/dt, pi/dt] equals
/// (rms_ratio * RMS(signal))^2. A zero signal yields zero density.
double noise_psd(const Record& signal, const NoiseSpec& noise);

/// Gaussian white sequence with two-sided density `density` at interval dt.
std::vector<double> white_noise(double density, double dt, std::size_t count, std::uint64_t seed);

/// |DFT| of the samples for bins 0..floor(N/2).
std::vector<double> fourier_amplitude(const std::vector<double>& samples);

}  // namespace seismon
