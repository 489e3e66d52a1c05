#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gfbsde {

/// Base class for all library errors. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression syntax error, with the byte offset and the token set the
/// parser would have accepted there.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::string expected)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// Evaluation outside a function's domain (division by zero, sqrt of a
/// negative, fractional power of a negative). Carries the printed
/// offending sub-expression.
class EvalDomainError : public Error {
 public:
  EvalDomainError(const std::string& what, std::string subexpr)
      : Error(what), subexpr_(std::move(subexpr)) {}
  const std::string& subexpr() const { return subexpr_; }

 private:
  std::string subexpr_;
};

/// Configuration / usage errors (bad file, unknown key, invariant violation).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Time step too large for the monotone explicit scheme.
class CflError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced during a solve; carries first offending (t, x).
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t, double x)
      : Error(what), t_(t), x_(x) {}
  double t() const { return t_; }
  double x() const { return x_; }

 private:
  double t_, x_;
};

/// Query outside the hull of a gridded field.
class HullError : public Error {
 public:
  using Error::Error;
};

/// Picard map failed to contract on the requested horizon.
class NonContractionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gfbsde
