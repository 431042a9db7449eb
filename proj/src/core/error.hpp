#pragma once

#include <stdexcept>
#include <string>

namespace imgrl {

// Mirrors imgrl_status in the C header; keep the two in sync.
enum class ErrorCode {
  InvalidParameter = 1,
  DimensionMismatch,
  MalformedHeader,
  TruncatedPayload,
  UnsupportedMaxval,
  UnknownImage,
  Transport,
  Protocol,
  InvalidProbability,
  IndexOutOfRange,
  MissingOracleEntry,
  MalformedSnapshot,
  EmptyRound,
  Config,
  Io,
  MalformedLog,
  Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace imgrl
