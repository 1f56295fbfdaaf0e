#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fq {

enum class ErrorCode {
  kMalformedRow,
  kNonMonotoneTimestamp,
  kMissingField,
  kEmptyInput,
  kDegenerateFeature,
  kInsufficientData,
  kDimensionMismatch,
  kShapeMismatch,
  kNonFiniteLoss,
  kMissingLevel,
  kLengthMismatch,
  kZeroRange,
  kRuinousReturn,
  kAlignmentError,
  kInvalidSpec,
  kInvalidArgument,
  kConfigError,
  kMissingArtifact,
  kFormatError,
  kIoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit path) can branch on the kind without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fq
