#pragma once

#include <stdexcept>
#include <string>

namespace etc {

// Base of every error raised by the library. The CLI maps the subclasses to
// exit codes (DivergenceError -> 2, everything else -> 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of the operands do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An input lies outside the domain of the operation (non-Hurwitz matrix,
// negative gain, state outside C u D, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration (trigger mode vs certificate,
// dwell time above the MASP, malformed config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace etc
