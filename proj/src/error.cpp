#include "segmeld/error.hpp"

namespace segmeld {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InfeasiblePlacement: return "InfeasiblePlacement";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::InsufficientClasses: return "InsufficientClasses";
    case ErrorCode::InsufficientMembers: return "InsufficientMembers";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::GalleryTooSmall: return "GalleryTooSmall";
    case ErrorCode::UnknownClassInExpected: return "UnknownClassInExpected";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::MissingPair: return "MissingPair";
  }
  return "Unknown";
}

}  // namespace segmeld
