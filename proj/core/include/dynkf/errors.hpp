#pragma once

#include <stdexcept>
#include <string>

namespace dynkf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value (model order, window sizes, factors, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (dimensions, frame order).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Linear algebra failure. Carries the condition number of the offending matrix.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}

  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Line and column are 1-based; column 0 means "whole line".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Inputs that are individually valid but inconsistent with each other.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace dynkf
