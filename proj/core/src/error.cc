#include "kfuse/error.h"

namespace kfuse {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDuplicateShotId: return "DuplicateShotId";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kMissingScore: return "MissingScore";
    case ErrorCode::kModelCountMismatch: return "ModelCountMismatch";
    case ErrorCode::kMixedFrameInput: return "MixedFrameInput";
    case ErrorCode::kZeroGroundTruth: return "ZeroGroundTruth";
    case ErrorCode::kFrameIdMismatch: return "FrameIdMismatch";
    case ErrorCode::kTooFewShots: return "TooFewShots";
    case ErrorCode::kClassTableMismatch: return "ClassTableMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kMissingImageSize: return "MissingImageSize";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadDimensions: return "BadDimensions";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kPlacementFailure: return "PlacementFailure";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           int line, const std::string& field) {
  std::string out(error_code_name(code));
  if (line > 0) out += " at line " + std::to_string(line);
  if (!field.empty()) out += " (field '" + field + "')";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, int line,
             std::string field)
    : std::runtime_error(format_message(code, message, line, field)),
      code_(code),
      line_(line),
      field_(std::move(field)),
      message_(message) {}

}  // namespace kfuse
