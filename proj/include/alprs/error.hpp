#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alprs {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kFileNotFound,
  kIoError,
  kMalformedHeader,
  kUnsupportedFormat,
  kImageTooSmall,
  kNotTemplateDb,
  kNotOcrModel,
  kCorruptFile,
  kVersionMismatch,
  kChecksumMismatch,
  kMissingClass,
  kEmptyInput,
  kDegenerateHistogram,
  kEmptyForeground,
  kPlateNotFound,
  kSegmentationFailed,
  kParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace alprs
