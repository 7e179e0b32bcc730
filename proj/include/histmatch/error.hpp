#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace histmatch {

enum class ErrorCode {
  kEmptyString,
  kInvalidCoordinate,
  kZeroMassAfterSuppression,
  kAbsoluteContinuity,
  kSwapSides,
  kInvalidCardinality,
  kTooLargeForOracle,
  kMetricMismatch,
  kInvalidK,
  kInvalidOverlap,
  kInvalidArgument,
  kConfigError,
  kParseError,
  kIoError,
};

/// Machine-readable token for an error code, e.g. "EmptyString".
std::string_view error_code_name(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace histmatch
