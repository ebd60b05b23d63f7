#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcb {

enum class ErrorCode {
  InvalidArgument,
  InvalidBlock,
  PrimaryBusy,
  InfeasibleScheme,
  UnknownWidth,
  NonPositiveWidth,
  DegenerateFit,
  StateSpaceTooLarge,
  SearchSpaceTooLarge,
  EmptySet,
  AllZero,
  DivideByZero,
  EmptyBox,
  InfeasibleBoxes,
  NoBlockFits,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidBlock: return "InvalidBlock";
    case ErrorCode::PrimaryBusy: return "PrimaryBusy";
    case ErrorCode::InfeasibleScheme: return "InfeasibleScheme";
    case ErrorCode::UnknownWidth: return "UnknownWidth";
    case ErrorCode::NonPositiveWidth: return "NonPositiveWidth";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::DivideByZero: return "DivideByZero";
    case ErrorCode::EmptyBox: return "EmptyBox";
    case ErrorCode::InfeasibleBoxes: return "InfeasibleBoxes";
    case ErrorCode::NoBlockFits: return "NoBlockFits";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dcb
