#include "jpegcons/error.hpp"

namespace jpegcons {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedMagic: return "UnsupportedMagic";
    case ErrorKind::MaxvalNot255: return "MaxvalNot255";
    case ErrorKind::TruncatedPayload: return "TruncatedPayload";
    case ErrorKind::WrongChannelCount: return "WrongChannelCount";
    case ErrorKind::NonMultipleOf8WithoutPadFlag: return "NonMultipleOf8WithoutPadFlag";
    case ErrorKind::QfOutOfRange: return "QfOutOfRange";
    case ErrorKind::NotBaseline: return "NotBaseline";
    case ErrorKind::UnsupportedSampling: return "UnsupportedSampling";
    case ErrorKind::BadMarker: return "BadMarker";
    case ErrorKind::HuffmanDecodeError: return "HuffmanDecodeError";
    case ErrorKind::TruncatedStream: return "TruncatedStream";
    case ErrorKind::PassthroughNotRepresentable: return "PassthroughNotRepresentable";
    case ErrorKind::CoefficientOutOfRange: return "CoefficientOutOfRange";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::OptionsMismatch: return "OptionsMismatch";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorKind::MissingReference: return "MissingReference";
    case ErrorKind::UnreachableY: return "UnreachableY";
    case ErrorKind::MalformedSampler: return "MalformedSampler";
    case ErrorKind::NotACompressedInput: return "NotACompressedInput";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::BadSidecar: return "BadSidecar";
    case ErrorKind::BadFixture: return "BadFixture";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(error_name(kind))
                                        : std::string(error_name(kind)) + ": " + detail),
      kind_(kind) {}

}  // namespace jpegcons
