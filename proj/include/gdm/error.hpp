#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdm {

// Root of every error raised by the library. The CLI maps configuration-type
// errors to exit code 1 and numerical failures to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SolverDivergence : public NumericalError {
 public:
  SolverDivergence(const std::string& what, double residual)
      : NumericalError(what + " (relative residual " + format_residual(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  static std::string format_residual(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", r);
    return buf;
  }

  double residual_;
};

class PicardNoConvergence : public NumericalError {
 public:
  PicardNoConvergence(const std::string& what, std::vector<double> history)
      : NumericalError(what), history_(std::move(history)) {}
  // Max-norm increments of successive iterates.
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace gdm
