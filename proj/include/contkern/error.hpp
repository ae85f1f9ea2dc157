#pragma once

#include <stdexcept>
#include <string>

namespace contkern {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (factorization breakdown, non-convergence, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace contkern
