#include "wsp/error.hpp"

namespace wsp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::DegenerateAxis: return "DegenerateAxis";
    case ErrorCode::NonPositiveDiagonal: return "NonPositiveDiagonal";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::NotCorrelation: return "NotCorrelation";
    case ErrorCode::NuTooSmall: return "NuTooSmall";
    case ErrorCode::EmptyPath: return "EmptyPath";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string where, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + " in " + where +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      where_(std::move(where)) {}

}  // namespace wsp
