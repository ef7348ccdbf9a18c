#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polarflow {

// Base for every error raised by the library. The C API maps each subclass
// onto one pf_status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments, malformed configuration or data.
class InputError : public Error {
 public:
  using Error::Error;
};

// CSV/config parse failure; carries the 1-based line number when known.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Requested equilibrium does not exist for the given parameters.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// A state became non-finite during integration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(what + " at step " + std::to_string(step)), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace polarflow
