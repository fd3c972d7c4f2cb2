#pragma once

#include <stdexcept>
#include <string>

namespace qsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Label collisions, unknown labels, and dimension mismatches between layouts.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// A value violates an operation's documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Solver failure, non-convergence, or an exhausted randomized search.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration (CLI and config files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsr
