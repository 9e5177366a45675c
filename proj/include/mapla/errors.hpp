#pragma once

#include <stdexcept>
#include <string>

namespace mapla {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky hit a pivot at or below tolerance.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// Point is outside the open body where a metric or potential is defined.
class NotInterior : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyBatch : public Error {
 public:
  using Error::Error;
};

class InitNotInterior : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; the CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable input or unwritable output; also exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mapla
