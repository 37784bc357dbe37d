#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace seismon {

enum class Units { acceleration, velocity };

/// "m/s^2" or "m/s".
std::string_view units_tag(Units units) noexcept;
/// Throws UnitError for anything other than the two supported tags.
Units parse_units(std::string_view tag);

/// Uniformly sampled time series.
struct Record {
  double dt = 0.0;
  std::vector<double> samples;
  std::string channel;
  Units units = Units::acceleration;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept {
    return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1);
  }
  double rms() const noexcept;

  /// Throws ValidationError unless dt > 0 and all samples are finite.
  void validate() const;
};

/// Throws UnitError if the record is not tagged with the expected units.
void require_units(const Record& record, Units expected);

}  // namespace seismon
