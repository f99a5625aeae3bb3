#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nestfrag {

/// Machine-readable failure codes shared by every module and the CLI.
enum class ErrorCode {
  Overlap,
  MissingElement,
  EmptyBlock,
  BadRange,
  NotInjective,
  Range,
  SizeMismatch,
  TooLarge,
  Negative,
  SumExceedsOne,
  RowSumExceedsBar,
  TotalExceedsOne,
  NotBinary,
  BadParams,
  HorizonNonpositive,
  Parse,
  Usage,
  BadConfig,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Overlap: return "OVERLAP";
    case ErrorCode::MissingElement: return "MISSING_ELEMENT";
    case ErrorCode::EmptyBlock: return "EMPTY_BLOCK";
    case ErrorCode::BadRange: return "BAD_RANGE";
    case ErrorCode::NotInjective: return "NOT_INJECTIVE";
    case ErrorCode::Range: return "RANGE";
    case ErrorCode::SizeMismatch: return "SIZE_MISMATCH";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::Negative: return "NEGATIVE";
    case ErrorCode::SumExceedsOne: return "SUM_EXCEEDS_ONE";
    case ErrorCode::RowSumExceedsBar: return "ROW_SUM_EXCEEDS_BAR";
    case ErrorCode::TotalExceedsOne: return "TOTAL_EXCEEDS_ONE";
    case ErrorCode::NotBinary: return "NOT_BINARY";
    case ErrorCode::BadParams: return "BAD_PARAMS";
    case ErrorCode::HorizonNonpositive: return "HORIZON_NONPOSITIVE";
    case ErrorCode::Parse: return "PARSE";
    case ErrorCode::Usage: return "USAGE";
    case ErrorCode::BadConfig: return "BAD_CONFIG";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nestfrag
