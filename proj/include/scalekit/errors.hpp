#pragma once

#include <stdexcept>
#include <string>

namespace scalekit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scale expression or fixture text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operation: an index outside the evaluated
/// prefix, a scale value below 1, mismatched shapes or prefixes.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine hit its cap without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A verified post-condition or precondition of a construction failed.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace scalekit
