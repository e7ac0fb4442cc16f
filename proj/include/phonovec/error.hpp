#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phonovec {

enum class Errc {
  // feature table
  EmptyTable,
  DuplicatePhone,
  ArityMismatch,
  BadFeatureValue,
  UnknownPhone,
  UnknownFeature,
  // dumps and corpora
  BadMagic,
  VersionMismatch,
  UnsupportedDtype,
  Truncated,
  NonFinite,
  SegmentOutOfRange,
  EmptySlice,
  MissingUtterance,
  NoSegments,
  // analogy evaluation
  MissingPhone,
  ZeroNorm,
  TooFewInstances,
  TooFewPhoneTypes,
  EmptyInput,
  UnknownMode,
  // vectors and edits
  EmptySide,
  RangeOutOfBounds,
  LengthMismatch,
  NoEligibleSegments,
  ZeroVector,
  // audio and measurement
  UnsupportedEncoding,
  Multichannel,
  SegmentTooShort,
  ConstantSeries,
  TooFewPairs,
  UnpairedAudio,
  // plumbing
  Io,
  Parse,
  InvalidConfig,
  MissingLayer,
};

std::string_view errc_name(Errc code);

/// Every failure the library reports carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace phonovec
