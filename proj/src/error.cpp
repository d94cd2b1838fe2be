#include "alprs/error.hpp"

namespace alprs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kFileNotFound: return "file not found";
    case ErrorCode::kIoError: return "i/o error";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kImageTooSmall: return "image too small";
    case ErrorCode::kNotTemplateDb: return "not a template DB";
    case ErrorCode::kNotOcrModel: return "not an OCR model";
    case ErrorCode::kCorruptFile: return "corrupt file";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kChecksumMismatch: return "checksum mismatch";
    case ErrorCode::kMissingClass: return "missing class";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kDegenerateHistogram: return "degenerate histogram";
    case ErrorCode::kEmptyForeground: return "empty foreground";
    case ErrorCode::kPlateNotFound: return "plate not found";
    case ErrorCode::kSegmentationFailed: return "segmentation failed";
    case ErrorCode::kParseError: return "parse error";
  }
  return "unknown error";
}

}  // namespace alprs
