#include "lse/error.hpp"

namespace lse {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::DegeneratePath: return "DegeneratePath";
    case ErrorKind::SingleLevelMode: return "SingleLevelMode";
    case ErrorKind::EnergyFold: return "EnergyFoldError";
    case ErrorKind::NoPeak: return "NoPeak";
    case ErrorKind::TruncatedLine: return "TruncatedLine";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::InvalidStart: return "InvalidStart";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::MissingKey: return "MissingKey";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::UnitMismatch: return "UnitMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateAbscissa: return "DuplicateAbscissa";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateSystem:
    case ErrorKind::StepTooLarge:
    case ErrorKind::DegeneratePath:
    case ErrorKind::EnergyFold:
    case ErrorKind::NoPeak:
    case ErrorKind::TruncatedLine:
    case ErrorKind::InvalidStart:
    case ErrorKind::Diverged:
      return ErrorClass::Numerical;
    default:
      return ErrorClass::Input;
  }
}

LseError::LseError(ErrorKind kind, std::string detail)
    : std::runtime_error(std::string(to_string(kind)) + "(" + detail + ")"),
      kind_(kind),
      detail_(std::move(detail)) {}

void fail(ErrorKind kind, std::string detail) { throw LseError(kind, std::move(detail)); }

}  // namespace lse
