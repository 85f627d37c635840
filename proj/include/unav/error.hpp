#pragma once

#include <stdexcept>
#include <string>

namespace unav {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoPathError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// The view-adjustment loop of trajectory collection hit its iteration cap.
class ViewLoopExceeded : public Error {
 public:
  using Error::Error;
};

/// A remote thought provider could not be reached or answered badly.
class ProviderFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (JSON, JSONL, binary raster, PGM).
class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace unav
