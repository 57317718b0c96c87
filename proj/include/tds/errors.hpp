#pragma once

#include <stdexcept>
#include <string>

namespace tds {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Label bookkeeping: duplicates, unknown names, collisions.
struct LabelError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct CircuitError : Error {
  using Error::Error;
};

struct NotAProcess : Error {
  using Error::Error;
};

struct NotAComb : Error {
  using Error::Error;
};

struct ReconstructionFailed : Error {
  using Error::Error;
};

struct NotClassical : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

}  // namespace tds
