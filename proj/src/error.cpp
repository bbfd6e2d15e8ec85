#include "priorcheck/error.hpp"

namespace priorcheck {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnbalancedData: return "UnbalancedData";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::InfeasibleV: return "InfeasibleV";
    case ErrorCode::ImproperPriorNotSamplable: return "ImproperPriorNotSamplable";
    case ErrorCode::EmptyDraws: return "EmptyDraws";
    case ErrorCode::NoResidualInformation: return "NoResidualInformation";
    case ErrorCode::DegenerateDiscrepancy: return "DegenerateDiscrepancy";
    case ErrorCode::UnknownDiscrepancy: return "UnknownDiscrepancy";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::OutOfRangeValue: return "OutOfRangeValue";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::BadRow: return "BadRow";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& what,
                     std::optional<std::size_t> line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += what;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& what,
             std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, what, line)), code_(code), line_(line) {}

}  // namespace priorcheck
