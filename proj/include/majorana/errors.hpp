#pragma once

#include <stdexcept>
#include <string>

namespace majorana {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The z component of the field never changes sign for the given ramp.
class NoReversal : public Error {
 public:
  using Error::Error;
};

/// The field magnitude vanishes where a direction or frequency is needed.
class ZeroField : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not meet its tolerance.
class StepSizeUnderflow : public Error {
 public:
  StepSizeUnderflow(const std::string& what, double time, double step, double worst_norm_drift)
      : Error(what), time_(time), step_(step), worst_norm_drift_(worst_norm_drift) {}

  double time() const noexcept { return time_; }
  double step() const noexcept { return step_; }
  double worst_norm_drift() const noexcept { return worst_norm_drift_; }

 private:
  double time_;
  double step_;
  double worst_norm_drift_;
};

/// A configuration key or value could not be accepted.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace majorana
