#pragma once

#include <stdexcept>
#include <string>

namespace annplan {

// Error categories map onto CLI exit codes: usage errors are raised by the
// CLI layer itself; everything derived from DataError exits 2, and
// MissingArtifactError exits 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Predicate references an unknown attribute, or the attribute kind does not
// match the term (range over a categorical column and the like).
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Malformed caller input: dimension mismatch, feature arity mismatch.
class InputError : public DataError {
 public:
  using DataError::DataError;
};

// A label (or label pair) absent from the precomputed statistics.
class LookupError : public DataError {
 public:
  using DataError::DataError;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

// File parse/load failures; message carries byte offset or line number.
class IoError : public DataError {
 public:
  using DataError::DataError;
};

class TrainError : public DataError {
 public:
  using DataError::DataError;
};

// A model or index required by the requested operation has not been built.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace annplan
