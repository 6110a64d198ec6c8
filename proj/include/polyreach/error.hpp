#pragma once

#include <stdexcept>
#include <string>

namespace polyreach {

enum class ErrorKind {
  invalid_input,
  invalid_config,
  unsupported_region,
  degenerate_region,
  out_of_range,
  numerical_failure,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::invalid_config: return "invalid config";
    case ErrorKind::unsupported_region: return "unsupported region";
    case ErrorKind::degenerate_region: return "degenerate region";
    case ErrorKind::out_of_range: return "out of range";
    case ErrorKind::numerical_failure: return "numerical failure";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a least-squares solve loses rank. Carries the estimated
/// condition number of the triangular factor.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double condition)
      : Error(ErrorKind::numerical_failure,
              what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace polyreach
