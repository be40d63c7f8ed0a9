#include "cartan/error.hpp"

namespace cartan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::UnboundSymbol: return "UnboundSymbol";
    case ErrorCode::PoleAtPoint: return "PoleAtPoint";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotMonic: return "NotMonic";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::NeedsCoordinateBasis: return "NeedsCoordinateBasis";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::SingularGroup: return "SingularGroup";
    case ErrorCode::PlanMismatch: return "PlanMismatch";
    case ErrorCode::IncompleteReduction: return "IncompleteReduction";
    case ErrorCode::SamplingFailure: return "SamplingFailure";
    case ErrorCode::NumericFailure: return "NumericFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace cartan
