#include "seismon/record.hpp"

#include "seismon/error.hpp"

#include <cmath>

namespace seismon {

std::string_view units_tag(Units units) noexcept {
  return units == Units::acceleration ? "m/s^2" : "m/s";
}

Units parse_units(std::string_view tag) {
  if (tag == "m/s^2") return Units::acceleration;
  if (tag == "m/s") return Units::velocity;
  throw UnitError("unsupported units tag '" + std::string(tag) + "' (expected m/s^2 or m/s)");
}

double Record::rms() const noexcept {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double s : samples) sum += s * s;
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

void Record::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("record dt must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i]))
      throw ValidationError("record '" + channel + "' has a non-finite sample at index " +
                            std::to_string(i));
  }
}

void require_units(const Record& record, Units expected) {
  if (record.units != expected) {
    throw UnitError("record '" + record.channel + "' is tagged " +
                    std::string(units_tag(record.units)) + " but " +
                    std::string(units_tag(expected)) + " is required");
  }
}

}  // namespace seismon
