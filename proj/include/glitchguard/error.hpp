#pragma once

#include <stdexcept>
#include <string>

namespace glitchguard {

// Base of every error the library raises. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or layer shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A file is missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was readable but its contents do not follow the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A configuration value or argument is outside its valid range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf in a loss, gradient or score.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace glitchguard
