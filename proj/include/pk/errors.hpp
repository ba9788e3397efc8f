#pragma once

#include <stdexcept>
#include <string>

namespace pk {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// p = 2 gets its own type: nothing in this library is valid there.
class UnsupportedPrime : public InvalidArgument {
 public:
  UnsupportedPrime() : InvalidArgument("p must be an odd prime") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero") {}
};

class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

// Raised when a theorem's hypotheses do not hold for the given input.
class Inapplicable : public Error {
 public:
  using Error::Error;
};

class ParseError : public InvalidArgument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InvalidArgument(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace pk
