#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seismon {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  validation,
  parse,
  unit_mismatch,
  singular,
  convergence,
  divergence,
  calibration,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::validation, message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnitError : public Error {
 public:
  explicit UnitError(const std::string& message)
      : Error(ErrorKind::unit_mismatch, message) {}
};

class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& message)
      : Error(ErrorKind::singular, message) {}
};

/// Newton iteration failed to reach tolerance at a given step.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::size_t step, double residual);
  std::size_t step() const noexcept { return step_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t step_;
  double residual_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& message, double best_coverage);
  double best_coverage() const noexcept { return best_coverage_; }

 private:
  double best_coverage_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

}  // namespace seismon
