#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nambu {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed field-definition text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A value was requested outside the set where it is defined: ln of a
/// non-positive number, division by zero, a point where the density
/// vanishes or the system's domain predicate fails.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Arguments violate an operation's precondition (wrong arity, bad index).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integration left the domain or the adaptive step collapsed.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, double last_valid_time)
      : Error(message), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// A diagnostic could not be computed because the input is degenerate
/// (zero errors in an order fit, a stationary point for density recovery).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace nambu
