#include "futurequant/error.hpp"

#include <algorithm>

#include "futurequant/tensor.hpp"

namespace fq {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kNonMonotoneTimestamp: return "NonMonotoneTimestamp";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegenerateFeature: return "DegenerateFeature";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kMissingLevel: return "MissingLevel";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroRange: return "ZeroRange";
    case ErrorCode::kRuinousReturn: return "RuinousReturn";
    case ErrorCode::kAlignmentError: return "AlignmentError";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Tensor3 Tensor3::gather(std::span<const std::size_t> indices) const {
  Tensor3 out(indices.size(), steps_, features_);
  const std::size_t stride = steps_ * features_;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto* src = data_.data() + indices[i] * stride;
    std::copy(src, src + stride, out.data_.data() + i * stride);
  }
  return out;
}

}  // namespace fq
