#include "loopcorr/error.hpp"

namespace loopcorr {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RealizationMismatch: return "RealizationMismatch";
    case ErrorCode::SingularProduct: return "SingularProduct";
    case ErrorCode::DivergentKernel: return "DivergentKernel";
    case ErrorCode::MissingMu: return "MissingMu";
    case ErrorCode::StructuralViolation: return "StructuralViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace loopcorr
