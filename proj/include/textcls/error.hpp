#pragma once

#include <stdexcept>
#include <string>

namespace textcls {

// Base of every library error. The CLI maps each subclass to its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid option or option combination; raised before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed, inconsistent or incompatible input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or other numerical breakdowns.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace textcls
