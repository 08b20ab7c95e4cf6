#pragma once

#include <stdexcept>
#include <string>

namespace mupir {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidParameter : Error {
  using Error::Error;
};

struct ParamMismatch : Error {
  using Error::Error;
};

struct InvalidDemand : Error {
  using Error::Error;
};

struct DecodeFailure : Error {
  using Error::Error;
};

struct NotEnumerable : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

struct IndivisibleLength : Error {
  using Error::Error;
};

}  // namespace mupir
