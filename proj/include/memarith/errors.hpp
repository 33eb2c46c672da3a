#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace memarith {

// Base class for every domain error raised by the simulator, the expression
// compiler and the file loaders.  The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Expression text could not be parsed.  offset() is the byte position of the
// first offending character (== text size for unexpected end of input).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A divisor subexpression evaluates to exactly zero.
class DivideByZeroError : public Error {
 public:
  explicit DivideByZeroError(const std::string& divisor)
      : Error("division by zero: divisor '" + divisor + "' evaluates to 0"),
        divisor_(divisor) {}
  const std::string& divisor() const { return divisor_; }

 private:
  std::string divisor_;
};

// A subexpression value cannot be stored as a memristance at the chosen scale.
class RangeError : public Error {
 public:
  RangeError(const std::string& subexpression, double required_ohms,
             double lo_ohms, double hi_ohms);
  const std::string& subexpression() const { return subexpression_; }
  double required_ohms() const { return required_ohms_; }

 private:
  std::string subexpression_;
  double required_ohms_;
};

// Programming target lies outside the representable band [r_on+tol, r_off-tol].
class TargetOutOfRangeError : public Error {
 public:
  TargetOutOfRangeError(double target_ohms, double lo_ohms, double hi_ohms);
  double target_ohms() const { return target_; }

 private:
  double target_;
};

// The programming loop ran past max_time without entering the tolerance band.
class TimeoutError : public Error {
 public:
  explicit TimeoutError(const std::string& what) : Error(what) {}
};

// Malformed config / device parameter / plan file, or an I/O failure.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace memarith
