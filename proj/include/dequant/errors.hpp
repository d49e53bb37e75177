#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace dequant {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const char* kind() const noexcept override { return "parse_error"; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    std::string out = "line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

class InvariantError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invariant_violation"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

/// Dense work requested beyond the configured dimension limit.
class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension_too_large"; }
};

class ZeroKappaError : public Error {
 public:
  ZeroKappaError() : Error("decomposition has zero total norm bound (kappa = 0)") {}
  const char* kind() const noexcept override { return "zero_kappa"; }
};

/// A sampled index has zero guiding amplitude but a nonzero target entry.
class UndefinedRatioError : public Error {
 public:
  explicit UndefinedRatioError(unsigned long long index)
      : Error("undefined ratio: sampled index " + std::to_string(index) +
              " has zero guiding amplitude but nonzero target entry"),
        index_(index) {}
  unsigned long long index() const noexcept { return index_; }
  const char* kind() const noexcept override { return "undefined_ratio"; }

 private:
  unsigned long long index_;
};

class DegreeOverflowError : public Error {
 public:
  DegreeOverflowError(const std::string& what, std::size_t cap) : Error(what), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }
  const char* kind() const noexcept override { return "degree_overflow"; }

 private:
  std::size_t cap_;
};

/// Preflight cost prediction exceeded the configured cap. `report` is a
/// machine-readable JSON document describing the prediction.
class CostCapExceeded : public Error {
 public:
  CostCapExceeded(double predicted, double cap, std::string report)
      : Error("predicted cost " + to_string(predicted) + " leaf operations exceeds cap " +
              to_string(cap)),
        predicted_(predicted),
        cap_(cap),
        report_(std::move(report)) {}

  double predicted() const noexcept { return predicted_; }
  double cap() const noexcept { return cap_; }
  const std::string& report() const noexcept { return report_; }
  const char* kind() const noexcept override { return "cost_cap_exceeded"; }

 private:
  static std::string to_string(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }

  double predicted_;
  double cap_;
  std::string report_;
};

}  // namespace dequant
