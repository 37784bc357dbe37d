#include "seismon/error.hpp"

#include <cstdio>

namespace seismon {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::unit_mismatch: return "unit-mismatch";
    case ErrorKind::singular: return "singular";
    case ErrorKind::convergence: return "non-convergence";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::calibration: return "calibration";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : Error(ErrorKind::parse, source + ":" + std::to_string(line) + ": " + message), line_(line) {}

ConvergenceError::ConvergenceError(std::size_t step, double residual)
    : Error(ErrorKind::convergence,
            "Newton iteration did not converge at step " + std::to_string(step) +
                " (relative residual " + sci(residual) + ")"),
      step_(step),
      residual_(residual) {}

DivergenceError::DivergenceError(std::size_t step)
    : Error(ErrorKind::divergence,
            "non-finite response detected at step " + std::to_string(step)),
      step_(step) {}

CalibrationError::CalibrationError(const std::string& message, double best_coverage)
    : Error(ErrorKind::calibration,
            message + " (best coverage " + std::to_string(best_coverage) + ")"),
      best_coverage_(best_coverage) {}

}  // namespace seismon
