#include "error.hpp"

namespace imgrl {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::MalformedHeader: return "malformed-header";
    case ErrorCode::TruncatedPayload: return "truncated-payload";
    case ErrorCode::UnsupportedMaxval: return "unsupported-maxval";
    case ErrorCode::UnknownImage: return "unknown-image";
    case ErrorCode::Transport: return "transport";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::InvalidProbability: return "invalid-probability";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::MissingOracleEntry: return "missing-oracle-entry";
    case ErrorCode::MalformedSnapshot: return "malformed-snapshot";
    case ErrorCode::EmptyRound: return "empty-round";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::MalformedLog: return "malformed-log";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace imgrl
