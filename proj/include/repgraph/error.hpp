#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repgraph {

enum class ErrorCode {
  SealedPeriod,
  PeriodMismatch,
  InvalidRecord,
  UnknownPeriod,
  PeriodNotResident,
  NotPersisted,
  ResidencyExceeded,
  ParseError,
  ValidationError,
  UnknownCurrency,
  NegativeAmount,
  NegativeInput,
  NotSealed,
  StateGap,
  MissingEvidence,
  InvalidParams,
  IoError,
  CorruptFile,
  MissingState,
  InvalidConfig,
  UnlabeledAccount,
  MissingPeriods,
  Locked,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SealedPeriod: return "SealedPeriod";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::UnknownPeriod: return "UnknownPeriod";
    case ErrorCode::PeriodNotResident: return "PeriodNotResident";
    case ErrorCode::NotPersisted: return "NotPersisted";
    case ErrorCode::ResidencyExceeded: return "ResidencyExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownCurrency: return "UnknownCurrency";
    case ErrorCode::NegativeAmount: return "NegativeAmount";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::NotSealed: return "NotSealed";
    case ErrorCode::StateGap: return "StateGap";
    case ErrorCode::MissingEvidence: return "MissingEvidence";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::MissingState: return "MissingState";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnlabeledAccount: return "UnlabeledAccount";
    case ErrorCode::MissingPeriods: return "MissingPeriods";
    case ErrorCode::Locked: return "Locked";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message is prefixed with the code name so CLI output is greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace repgraph
