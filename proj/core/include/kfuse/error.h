#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kfuse {

enum class ErrorCode {
  kInvalidArgument,
  // manifest / model
  kMissingFile,
  kDimensionMismatch,
  kDuplicateShotId,
  kSchemaVersionMismatch,
  // warp
  kNonConvergence,
  // fusion
  kMissingScore,
  kModelCountMismatch,
  // eval
  kMixedFrameInput,
  kZeroGroundTruth,
  kFrameIdMismatch,
  kTooFewShots,
  kClassTableMismatch,
  // io
  kParseError,
  kRangeError,
  kMissingImageSize,
  kIoError,
  kBadMagic,
  kBadDimensions,
  kNonFiniteValue,
  // synthgen
  kPlacementFailure,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library. `line` is 1-based and 0 when the
// error is not tied to a text location; `field` names the offending field
// for range errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0,
        std::string field = {});

  ErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  // The message without the code and location prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  int line_;
  std::string field_;
  std::string message_;
};

}  // namespace kfuse
