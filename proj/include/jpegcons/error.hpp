#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jpegcons {

enum class ErrorKind {
  UnsupportedMagic,
  MaxvalNot255,
  TruncatedPayload,
  WrongChannelCount,
  NonMultipleOf8WithoutPadFlag,
  QfOutOfRange,
  NotBaseline,
  UnsupportedSampling,
  BadMarker,
  HuffmanDecodeError,
  TruncatedStream,
  PassthroughNotRepresentable,
  CoefficientOutOfRange,
  DimMismatch,
  OptionsMismatch,
  EmptySet,
  TooFewSamples,
  MissingGroundTruth,
  MissingReference,
  UnreachableY,
  MalformedSampler,
  NotACompressedInput,
  NonFiniteLoss,
  BadSidecar,
  BadFixture,
  InvalidArgument,
};

std::string_view error_name(ErrorKind kind);

// Every domain failure in the library is reported through this type. The
// CLI prints error_name(kind()) on stderr and exits with status 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail = {}) {
  throw Error(kind, detail);
}

}  // namespace jpegcons
