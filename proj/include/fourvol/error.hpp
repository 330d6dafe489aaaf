#pragma once

#include <stdexcept>
#include <string>

namespace fourvol {

/// Base of every error raised by the library. `exit_code()` is the process
/// exit status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

/// Invalid configuration: bad option, missing key, inconsistent window length.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Tuning parameters violate a frequency-availability or grid-size constraint.
class TuningError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed or inconsistent observations.
class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// A sampling scheme produced an unusable grid.
class SamplingError : public DataError {
 public:
  using DataError::DataError;
};

/// A functional was evaluated outside its domain (e.g. singular input to log).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  int exit_code() const noexcept override { return 4; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Numerical failure inside estimation (wraps a DomainError with its location).
class EstimationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// Studentization or interval construction impossible (non-positive variance).
class InferenceError : public Error {
 public:
  InferenceError(const std::string& what, double raw_variance)
      : Error(what), raw_variance_(raw_variance) {}
  int exit_code() const noexcept override { return 4; }
  double raw_variance() const noexcept { return raw_variance_; }

 private:
  double raw_variance_;
};

}  // namespace fourvol
