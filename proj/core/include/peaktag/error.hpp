#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace peaktag {

enum class ErrorCode {
  Io = 1,
  MissingExif,
  MissingFocalLength,
  LowConfidence,
  NonPositiveInput,
  EmptyImage,
  PhotoWiderThanPanorama,
  EmptyGrid,
  NoCandidates,
  WidthMismatch,
  MalformedPeaks,
  MalformedInput,
  NoPairs,
  EmptyDataset,
  InvalidConfig,
};

/// Stable machine-readable name, e.g. "MissingFocalLength".
std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace peaktag
