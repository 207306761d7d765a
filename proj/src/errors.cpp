#include "qdx/errors.hpp"

namespace qdx {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroDilation: return "ZeroDilation";
    case ErrorCode::ZeroEvaluationPoint: return "ZeroEvaluationPoint";
    case ErrorCode::ZeroArgument: return "ZeroArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BracketingFailed: return "BracketingFailed";
    case ErrorCode::ZeroPoint: return "ZeroPoint";
    case ErrorCode::PoleOnCircle: return "PoleOnCircle";
    case ErrorCode::SingularGauge: return "SingularGauge";
    case ErrorCode::EmptyOperator: return "EmptyOperator";
    case ErrorCode::ResonantNormalization: return "ResonantNormalization";
    case ErrorCode::ForbiddenDirection: return "ForbiddenDirection";
    case ErrorCode::WindowOverflow: return "WindowOverflow";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::BasePointOnSpiral: return "BasePointOnSpiral";
    case ErrorCode::BadQValue: return "BadQValue";
    case ErrorCode::CocycleNotClosed: return "CocycleNotClosed";
    case ErrorCode::DescentFailed: return "DescentFailed";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace qdx
