#pragma once

#include <stdexcept>
#include <string>

namespace bilts {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative rotation angle too close to pi; the matrix logarithm is not unique.
struct RotationNearPi : Error {
  using Error::Error;
};

// Rotational velocity below tolerance; the screw axis lies at infinity.
struct PureTranslation : Error {
  using Error::Error;
};

// eQR diagonal entry below tolerance in the unregularized path.
struct SingularDecomposition : Error {
  using Error::Error;
};

// ISA invariants unbounded because r11 or r22 is (near) zero.
struct SingularInvariants : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

// Total traversed progress below tolerance; the trajectory is motionless
// under the selected progress definition.
struct DegenerateProgress : Error {
  using Error::Error;
};

// Descriptors computed at incommensurate progress scales.
struct MismatchedScale : Error {
  using Error::Error;
};

// Too few descriptor instances to compare trajectories.
struct TooShort : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct ParseError : IoError {
  ParseError(const std::string& msg, int line_number)
      : IoError(msg + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  int line;
};

struct SchemaError : IoError {
  using IoError::IoError;
};

// Protocol violation in the recognition train/test split.
struct ProtocolError : Error {
  using Error::Error;
};

}  // namespace bilts
