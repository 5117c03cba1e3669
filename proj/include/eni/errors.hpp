#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eni {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class PointNotInFreeSpace : public Error {
 public:
  using Error::Error;
};

class EmptyFreeSpace : public Error {
 public:
  using Error::Error;
};

class SamplingFailed : public Error {
 public:
  SamplingFailed(const std::string& what, std::size_t achieved)
      : Error(what), achieved_count(achieved) {}
  std::size_t achieved_count;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class PoseOutOfBounds : public Error {
 public:
  using Error::Error;
};

class PlanningFailed : public Error {
 public:
  using Error::Error;
};

class SimulationDiverged : public Error {
 public:
  using Error::Error;
};

// File-format errors.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  using IoError::IoError;
};

class InvariantViolation : public IoError {
 public:
  using IoError::IoError;
};

class UnsupportedVersion : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace eni
