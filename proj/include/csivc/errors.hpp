#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csivc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad rows, bad configuration, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A kernel smoother found no data with positive weight around `where`.
class NoLocalData : public Error {
 public:
  explicit NoLocalData(double where)
      : Error("no local data at " + std::to_string(where)), where_(where) {}
  double where() const noexcept { return where_; }

 private:
  double where_;
};

// Numerical or statistical failure inside an estimation step.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace csivc
