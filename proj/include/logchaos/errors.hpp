#pragma once

#include <stdexcept>
#include <string>

namespace logchaos {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (unsupported profile, mismatched metadata, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation called outside its stated preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Linear algebra or quadrature breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo estimate is too noisy to be used downstream.
class QualityError : public Error {
 public:
  using Error::Error;
};

/// A strictly positive quantity underflowed to zero.
class UnderflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace logchaos
