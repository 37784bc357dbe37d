#pragma once

#include "seismon/record.hpp"

#include <array>
#include <vector>

namespace seismon {

/// High-pass Butterworth applied forward and backward (zero phase).
struct FilterSpec {
  int order = 4;
  double cutoff_hz = 0.1;

  void validate(double sample_dt) const;
};

/// One biquad in direct form II transposed; a0 is normalized to 1.
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 3> a{1.0, 0.0, 0.0};
};

/// Second-order sections of a digital Butterworth high-pass designed by the
/// bilinear transform with frequency prewarping. Odd orders get one
/// first-order section (b[2] = a[2] = 0).
std::vector<Biquad> butterworth_highpass(int order, double cutoff_hz, double sample_dt);

/// Causal filtering through the cascade, starting from the steady state for
/// a constant input equal to x[0].
std::vector<double> sosfilt(const std::vector<Biquad>& sections, const std::vector<double>& x);

/// Forward-backward filtering with odd-reflection padding at both ends.
std::vector<double> filtfilt(const std::vector<Biquad>& sections, const std::vector<double>& x,
                             std::size_t pad);

/// Cumulative trapezoidal integral starting at 0.
std::vector<double> integrate_trapezoid(const std::vector<double>& x, double dt);

/// Trapezoidal integration to velocity followed by the zero-phase
/// high-pass. Input must be tagged m/s^2; output is tagged m/s.
Record accel_to_velocity(const Record& accel, const FilterSpec& filter = {});

}  // namespace seismon
