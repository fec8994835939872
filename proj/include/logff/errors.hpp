#pragma once

#include <stdexcept>
#include <string>

namespace logff {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A divided-power division produced a coefficient of negative p-adic valuation.
class NonIntegral : public Error {
 public:
  using Error::Error;
};

class SpecMismatch : public Error {
 public:
  using Error::Error;
};

/// A ring map is not of unit-monomial type, or is not legal on the target ring.
class IllegalMap : public Error {
 public:
  using Error::Error;
};

/// Two maps that should agree modulo p do not.
class LiftMismatch : public Error {
 public:
  using Error::Error;
};

class ElementNotInFil : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string invariant, const std::string& what)
      : Error(what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace logff
