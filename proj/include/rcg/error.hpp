#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcg {

enum class ErrorCode {
  DuplicateId,
  MalformedRecord,
  AlignmentError,
  EmptyCorpus,
  InvalidThresholds,
  EncoderUnavailable,
  ProtocolViolation,
  DimensionMismatch,
  MissingVector,
  Unsupported,
  EncoderMismatch,
  ZeroQuery,
  InvalidBudget,
  InvalidArgument,
  NoExemplar,
  GeneratorUnavailable,
  EmptyReference,
  EmptyInput,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rcg
