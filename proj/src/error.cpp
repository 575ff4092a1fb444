#include "lipfm/error.hpp"

namespace lipfm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kUnsupportedDistribution: return "unsupported-distribution";
    case ErrorKind::kEvaluationFailure: return "evaluation-failure";
    case ErrorKind::kNumericalFailure: return "numerical-failure";
    case ErrorKind::kHypothesisViolation: return "hypothesis-violation";
    case ErrorKind::kInvalidConfiguration: return "invalid-configuration";
    case ErrorKind::kIoError: return "io-error";
    case ErrorKind::kUsage: return "usage-error";
  }
  return "unknown";
}

}  // namespace lipfm
