#include "camext/error.h"

namespace camext {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNotARotation: return "NotARotation";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kMissingKey: return "MissingKey";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kSingularHomography: return "SingularHomography";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kChannelMismatch: return "ChannelMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace camext
