#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ringbec {

enum class ErrorCode {
  InadmissibleBeta,
  NonPositive,
  ShootingFailed,
  NegativeBase,
  NoCriticalPoint,
  GridTooLarge,
  NewtonDiverged,
  SingularJacobian,
  BoundaryPeak,
  PeakMismatch,
  SingularOperator,
  ContractionFailed,
  NoSignChange,
  InsufficientTail,
  NoBracket,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InadmissibleBeta: return "InadmissibleBeta";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::ShootingFailed: return "ShootingFailed";
    case ErrorCode::NegativeBase: return "NegativeBase";
    case ErrorCode::NoCriticalPoint: return "NoCriticalPoint";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::BoundaryPeak: return "BoundaryPeak";
    case ErrorCode::PeakMismatch: return "PeakMismatch";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::ContractionFailed: return "ContractionFailed";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace ringbec
