#include "seismon/signal.hpp"

#include "seismon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seismon {

void FilterSpec::validate(double sample_dt) const {
  if (order < 1) throw ValidationError("filter order must be at least 1");
  const double nyquist = 0.5 / sample_dt;
  if (!(cutoff_hz > 0.0 && cutoff_hz < nyquist))
    throw ValidationError("filter cutoff " + std::to_string(cutoff_hz) + " Hz must lie in (0, " +
                          std::to_string(nyquist) + ") Hz");
}

std::vector<Biquad> butterworth_highpass(int order, double cutoff_hz, double sample_dt) {
  FilterSpec{order, cutoff_hz}.validate(sample_dt);
  const double fs = 1.0 / sample_dt;
  const double k = 2.0 * fs;
  const double wc = k * std::tan(std::numbers::pi * cutoff_hz / fs);

  std::vector<Biquad> sections;
  // Conjugate pole pairs of the normalized low-pass prototype; each section
  // maps s -> wc/s then s -> k (z-1)/(z+1).
  for (int i = 0; i < order / 2; ++i) {
    const double theta = std::numbers::pi * (2.0 * i + 1.0 + order) / (2.0 * order);
    const double damping = -2.0 * std::cos(theta);  // -2 Re(p) > 0
    const double a0 = k * k + damping * wc * k + wc * wc;
    Biquad s;
    s.b = {k * k / a0, -2.0 * k * k / a0, k * k / a0};
    s.a = {1.0, (2.0 * wc * wc - 2.0 * k * k) / a0, (k * k - damping * wc * k + wc * wc) / a0};
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double a0 = k + wc;
    Biquad s;
    s.b = {k / a0, -k / a0, 0.0};
    s.a = {1.0, (wc - k) / a0, 0.0};
    sections.push_back(s);
  }
  return sections;
}

std::vector<double> sosfilt(const std::vector<Biquad>& sections, const std::vector<double>& x) {
  std::vector<double> y = x;
  if (y.empty()) return y;
  for (const Biquad& s : sections) {
    // Steady state for a constant input u = y[0]: output g*u with g = H(1).
    const double u = y.front();
    const double gain = (s.b[0] + s.b[1] + s.b[2]) / (s.a[0] + s.a[1] + s.a[2]);
    const double out = gain * u;
    double z2 = s.b[2] * u - s.a[2] * out;
    double z1 = s.b[1] * u - s.a[1] * out + z2;
    for (double& v : y) {
      const double in = v;
      v = s.b[0] * in + z1;
      z1 = s.b[1] * in - s.a[1] * v + z2;
      z2 = s.b[2] * in - s.a[2] * v;
    }
  }
  return y;
}

std::vector<double> filtfilt(const std::vector<Biquad>& sections, const std::vector<double>& x,
                             std::size_t pad) {
  if (x.size() < 2) return x;
  pad = std::min(pad, x.size() - 1);
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[x.size() - 1 - i]);

  std::vector<double> forward = sosfilt(sections, ext);
  std::reverse(forward.begin(), forward.end());
  std::vector<double> backward = sosfilt(sections, forward);
  std::reverse(backward.begin(), backward.end());
  return {backward.begin() + static_cast<std::ptrdiff_t>(pad),
          backward.begin() + static_cast<std::ptrdiff_t>(pad + x.size())};
}

std::vector<double> integrate_trapezoid(const std::vector<double>& x, double dt) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (x[i - 1] + x[i]);
  return out;
}

Record accel_to_velocity(const Record& accel, const FilterSpec& filter) {
  accel.validate();
  require_units(accel, Units::acceleration);
  filter.validate(accel.dt);

  const auto sections = butterworth_highpass(filter.order, filter.cutoff_hz, accel.dt);
  // Three periods of the cutoff on each side.
  const auto pad = static_cast<std::size_t>(std::ceil(3.0 / (filter.cutoff_hz * accel.dt)));

  Record out;
  out.dt = accel.dt;
  out.channel = accel.channel;
  out.units = Units::velocity;
  out.samples = filtfilt(sections, integrate_trapezoid(accel.samples, accel.dt), pad);
  return out;
}

}  // namespace seismon
