#pragma once

#include <stdexcept>
#include <string>

namespace ppm {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the exact/enumerable range an operation supports.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A model, region or configuration fails a structural precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppm
