#pragma once

#include <stdexcept>
#include <string>

namespace minpred {

// Base for every error this library raises deliberately.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched tensor/vector dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Bad configuration values (negative lambda, warmup >= epochs, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable input data (CSV parse failures, constant columns,
// series too short to window, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure at runtime: non-finite loss, diverged recursion,
// undefined metric.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace minpred
