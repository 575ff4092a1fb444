#pragma once

#include <stdexcept>
#include <string>

namespace lipfm {

enum class ErrorKind {
  kInvalidArgument,
  kUnsupportedDistribution,
  kEvaluationFailure,
  kNumericalFailure,
  kHypothesisViolation,
  kInvalidConfiguration,
  kIoError,
  kUsage,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` drives the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace lipfm
