#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgsmith {

enum class ErrorCode {
  InvalidArgument,
  InvalidOntology,
  InvalidName,
  DuplicateName,
  UnknownKg,
  UnknownType,
  UnknownRelation,
  UnknownRef,
  UnknownKey,
  MalformedFile,
  EmptyFile,
  SchemaViolation,
  DanglingEndpoint,
  StoreUnavailable,
  StoreBusy,
  IoFailure,
  CorruptSnapshot,
  EmptyPattern,
  NoIntent,
  DimensionMismatch,
  LengthMismatch,
  UnknownToken,
  WrongDataType,
  PayloadTooLarge,
};

// Stable machine-readable name, e.g. "DuplicateName".
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace kgsmith
