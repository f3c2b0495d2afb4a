#pragma once

#include <stdexcept>
#include <string>

namespace bcp {

enum class ErrorCode {
  // input / configuration problems (CLI exit code 2)
  ConfigInvalid,
  SigmaNonpositive,
  StartOnOrAboveBoundary,
  NonfiniteCurve,
  BetaRestrictionViolated,
  OrderingViolated,
  InvalidLevel,
  BoundariesCross,
  GridMismatch,
  NotApplicable,

  // numerical failures (CLI exit code 3)
  NonfiniteDerivative,
  DegenerateDrift,
  NonfiniteIntegral,
  AlphaTildeZero,
  QuadratureBudgetExceeded,
  WeightOverflow,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::SigmaNonpositive: return "SigmaNonpositive";
    case ErrorCode::StartOnOrAboveBoundary: return "StartOnOrAboveBoundary";
    case ErrorCode::NonfiniteCurve: return "NonfiniteCurve";
    case ErrorCode::BetaRestrictionViolated: return "BetaRestrictionViolated";
    case ErrorCode::OrderingViolated: return "OrderingViolated";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::BoundariesCross: return "BoundariesCross";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NonfiniteDerivative: return "NonfiniteDerivative";
    case ErrorCode::DegenerateDrift: return "DegenerateDrift";
    case ErrorCode::NonfiniteIntegral: return "NonfiniteIntegral";
    case ErrorCode::AlphaTildeZero: return "AlphaTildeZero";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::WeightOverflow: return "WeightOverflow";
  }
  return "UnknownError";
}

/// True for errors that indicate a malformed problem/config rather than a
/// numerical failure during evaluation.
inline bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::SigmaNonpositive:
    case ErrorCode::StartOnOrAboveBoundary:
    case ErrorCode::NonfiniteCurve:
    case ErrorCode::BetaRestrictionViolated:
    case ErrorCode::OrderingViolated:
    case ErrorCode::InvalidLevel:
    case ErrorCode::BoundariesCross:
    case ErrorCode::GridMismatch:
    case ErrorCode::NotApplicable:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace bcp
