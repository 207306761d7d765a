#pragma once

#include <stdexcept>
#include <string>

namespace qdx {

enum class ErrorCode {
  ZeroDilation,
  ZeroEvaluationPoint,
  ZeroArgument,
  DomainError,
  BracketingFailed,
  ZeroPoint,
  PoleOnCircle,
  SingularGauge,
  EmptyOperator,
  ResonantNormalization,
  ForbiddenDirection,
  WindowOverflow,
  Unsupported,
  BasePointOnSpiral,
  BadQValue,
  CocycleNotClosed,
  DescentFailed,
  UnknownSuite,
  InvalidInput,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qdx
