#pragma once

#include <stdexcept>
#include <string>

namespace wmp {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV schema, layout, labels).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical failure (non-finite loss, non-finite gradient).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Bad configuration: missing files, invalid option combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wmp
