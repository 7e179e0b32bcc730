#include "histmatch/error.hpp"

namespace histmatch {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyString: return "EmptyString";
    case ErrorCode::kInvalidCoordinate: return "InvalidCoordinate";
    case ErrorCode::kZeroMassAfterSuppression: return "ZeroMassAfterSuppression";
    case ErrorCode::kAbsoluteContinuity: return "AbsoluteContinuity";
    case ErrorCode::kSwapSides: return "SwapSides";
    case ErrorCode::kInvalidCardinality: return "InvalidCardinality";
    case ErrorCode::kTooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::kMetricMismatch: return "MetricMismatch";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kInvalidOverlap: return "InvalidOverlap";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace histmatch
