#include "kgsmith/error.hpp"

namespace kgsmith {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::InvalidOntology: return "InvalidOntology";
  case ErrorCode::InvalidName: return "InvalidName";
  case ErrorCode::DuplicateName: return "DuplicateName";
  case ErrorCode::UnknownKg: return "UnknownKg";
  case ErrorCode::UnknownType: return "UnknownType";
  case ErrorCode::UnknownRelation: return "UnknownRelation";
  case ErrorCode::UnknownRef: return "UnknownRef";
  case ErrorCode::UnknownKey: return "UnknownKey";
  case ErrorCode::MalformedFile: return "MalformedFile";
  case ErrorCode::EmptyFile: return "EmptyFile";
  case ErrorCode::SchemaViolation: return "SchemaViolation";
  case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
  case ErrorCode::StoreUnavailable: return "StoreUnavailable";
  case ErrorCode::StoreBusy: return "StoreBusy";
  case ErrorCode::IoFailure: return "IoFailure";
  case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
  case ErrorCode::EmptyPattern: return "EmptyPattern";
  case ErrorCode::NoIntent: return "NoIntent";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::LengthMismatch: return "LengthMismatch";
  case ErrorCode::UnknownToken: return "UnknownToken";
  case ErrorCode::WrongDataType: return "WrongDataType";
  case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
  }
  return "Unknown";
}

} // namespace kgsmith
