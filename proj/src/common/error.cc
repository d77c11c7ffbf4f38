#include "riskx/common/error.h"

namespace riskx {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument:
      return "MalformedDocument";
    case ErrorCode::kCoverMismatch:
      return "CoverMismatch";
    case ErrorCode::kFeatureIndexOutOfRange:
      return "FeatureIndexOutOfRange";
    case ErrorCode::kSchemaMismatch:
      return "SchemaMismatch";
    case ErrorCode::kDegenerateData:
      return "DegenerateData";
    case ErrorCode::kTooFewRows:
      return "TooFewRows";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kTooManyFeatures:
      return "TooManyFeatures";
    case ErrorCode::kUnknownFeature:
      return "UnknownFeature";
    case ErrorCode::kUncontrollableFeature:
      return "UncontrollableFeature";
    case ErrorCode::kOutOfBounds:
      return "OutOfBounds";
    case ErrorCode::kMissingFeature:
      return "MissingFeature";
    case ErrorCode::kInvalidValue:
      return "InvalidValue";
    case ErrorCode::kEmptyKnowledgeBase:
      return "EmptyKnowledgeBase";
    case ErrorCode::kUncontrollableInDaily:
      return "UncontrollableInDaily";
    case ErrorCode::kIncompleteBaseline:
      return "IncompleteBaseline";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

}  // namespace riskx
