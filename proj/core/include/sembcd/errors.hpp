#pragma once

#include <stdexcept>
#include <string>

namespace sembcd {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text: unreadable file, bad JSON, bad CSV, invalid graph encoding.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration (simulation/fit options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A semantic precondition on data or parameters does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Matrix entries present where the graph imposes structural zeros.
class PatternError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A matrix that must be invertible (or positive definite) is not.
class SingularError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Design matrix is column-rank-deficient; the projected solver applies instead.
class RankDeficientError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Input exceeds the hard size limit of an enumeration routine.
class SizeLimitError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Data matrix fails its invariants (too few samples, rank-deficient rows, ...).
class DataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Model comparison requested for graphs that are not nested.
class NotNestedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace sembcd
