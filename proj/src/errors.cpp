#include "gracecbf/errors.hpp"

namespace gracecbf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateConstraint: return "DegenerateConstraint";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::CatastropheBoundary: return "CatastropheBoundary";
    case ErrorCode::ComplexRoots: return "ComplexRoots";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::ControllerUndefined: return "ControllerUndefined";
    case ErrorCode::MissingSignal: return "MissingSignal";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gracecbf
