#include "rcg/error.hpp"

namespace rcg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidThresholds: return "InvalidThresholds";
    case ErrorCode::EncoderUnavailable: return "EncoderUnavailable";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingVector: return "MissingVector";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::EncoderMismatch: return "EncoderMismatch";
    case ErrorCode::ZeroQuery: return "ZeroQuery";
    case ErrorCode::InvalidBudget: return "InvalidBudget";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoExemplar: return "NoExemplar";
    case ErrorCode::GeneratorUnavailable: return "GeneratorUnavailable";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rcg
