#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mlcd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing input (bad file, bad line, bad flag).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Parse failure tied to a specific line of an input file.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Iterative solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, std::size_t iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

/// Two inputs that must refer to the same node set or layer set do not.
class MismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlcd
