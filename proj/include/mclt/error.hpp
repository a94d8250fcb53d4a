#pragma once

#include <stdexcept>
#include <string>

namespace mclt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed: non-finite entries, unsorted samples, bad files.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A model or bound was requested with missing or inconsistent parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An N-function evaluated to a non-finite value where a finite one is required.
class InvalidFunctionError : public Error {
 public:
  using Error::Error;
};

class NotImplementedError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration is invalid (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Violated internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mclt
