#pragma once

#include <stdexcept>
#include <string>

namespace hearaug {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// File exists but its contents are not in a supported format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// JSON document violates the documented schema (missing keys, duplicates,
// inconsistent metadata).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace hearaug
