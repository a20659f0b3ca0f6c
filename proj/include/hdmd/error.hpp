#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdmd {

enum class ErrorCode {
  DimensionMismatch,
  DegenerateData,
  NonFinite,
  WindowTooShort,
  NonPositiveInput,
  ConstantChannel,
  Upsampling,
  TooFewCrossings,
  ZeroVarianceTruth,
  DegenerateSupport,
  OriginOutOfRange,
  RecordTooShort,
  InvalidConfig,
  ParseError,
  IoError,
};

// Process exit status grouping used by the command-line tool.
enum class ErrorCategory { Config = 1, Data = 2, Numerical = 3 };

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::ConstantChannel: return "ConstantChannel";
    case ErrorCode::Upsampling: return "Upsampling";
    case ErrorCode::TooFewCrossings: return "TooFewCrossings";
    case ErrorCode::ZeroVarianceTruth: return "ZeroVarianceTruth";
    case ErrorCode::DegenerateSupport: return "DegenerateSupport";
    case ErrorCode::OriginOutOfRange: return "OriginOutOfRange";
    case ErrorCode::RecordTooShort: return "RecordTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

constexpr ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveInput:
    case ErrorCode::WindowTooShort:
    case ErrorCode::Upsampling:
    case ErrorCode::InvalidConfig:
    case ErrorCode::IoError:
      return ErrorCategory::Config;
    case ErrorCode::DegenerateData:
    case ErrorCode::DegenerateSupport:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace hdmd
