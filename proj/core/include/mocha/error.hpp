// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mocha {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or map shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (divisibility, positivity, unknown enum names).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A violated precondition on a scalar argument.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or an argument outside the mathematical domain.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed wavelet pyramid.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Fewer than two channels in a motif group.
class DegenerateGroupError : public Error {
 public:
  using Error::Error;
};

/// Empty evaluation mask.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated binary input. Carries the byte offset at which
/// parsing stopped.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Syntactically valid input in a variant the readers do not handle
/// (color PFM, ASCII PNM).
class UnsupportedFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// File system failure (missing file, unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mocha
