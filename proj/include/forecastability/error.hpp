#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forecastability {

enum class ErrorCode {
  InfeasibleLength,
  InvalidConfig,
  FileError,
  FormatError,
  EmptyPanel,
  IoError,
  DegenerateSeries,
  TooFewPoints,
  NonFinite,
  GateIvFailure,
  ScaleUndefined,
  EmptyInput,
  HistoryTooShort,
  FitFailure,
  AllCandidatesFailed,
  LengthMismatch,
  ProbeFailure,
  InsufficientData,
  DegenerateInput,
  InvalidSpec,
  UsageError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers can map it to
// a gate, a reject reason, or an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace forecastability
