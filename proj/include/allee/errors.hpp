#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace allee {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime argument is out of its documented range (state outside [0,b],
/// zero trial count, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A map spec, system config or file fails its structural invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The supplied map has no admissible pair of positive fixed points
/// (missing roots, tangency, or roots outside the domain).
class NotAnAlleeMapError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A custom map flagged unimodal has more than one interior peak.
class NotUnimodalError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// An operation was invoked outside its documented setting, e.g. an
/// increasing-maps theorem applied to unimodal maps.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Every trial of a hitting-time estimate was censored at the cap, so no
/// mean can be reported. Carries the censoring count.
class EstimateUnavailableError : public Error {
 public:
  EstimateUnavailableError(const std::string& what, std::size_t censored)
      : Error(what), censored_(censored) {}
  std::size_t censored() const { return censored_; }

 private:
  std::size_t censored_;
};

}  // namespace allee
