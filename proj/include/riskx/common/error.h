#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskx {

// Machine-readable failure categories shared by every module. The names
// returned by ErrorCodeName() are part of the CLI and HTTP contracts.
enum class ErrorCode {
  kMalformedDocument,
  kCoverMismatch,
  kFeatureIndexOutOfRange,
  kSchemaMismatch,
  kDegenerateData,
  kTooFewRows,
  kOutOfRange,
  kTooManyFeatures,
  kUnknownFeature,
  kUncontrollableFeature,
  kOutOfBounds,
  kMissingFeature,
  kInvalidValue,
  kEmptyKnowledgeBase,
  kUncontrollableInDaily,
  kIncompleteBaseline,
  kInvalidArgument,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field_path = {})
      : std::runtime_error(message),
        code_(code),
        field_path_(std::move(field_path)) {}

  ErrorCode code() const { return code_; }
  // JSON-pointer-like location of the offending input, empty when unknown.
  const std::string& field_path() const { return field_path_; }

 private:
  ErrorCode code_;
  std::string field_path_;
};

}  // namespace riskx
