#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace krorder {

enum class ErrorCode {
  // input validation
  AsymmetricDistance,
  TriangleViolation,
  ZeroDistanceDistinctPoints,
  NegativeDistance,
  BadBaseIndex,
  NotSquare,
  EmptySpace,
  LengthMismatch,
  NotAPoset,
  NotProbability,
  SpaceMismatch,
  LambdaOutOfRange,
  NegativeScale,
  NonzeroTotalMass,
  EmptyFamily,
  PreconditionViolated,
  NonNumericLabels,
  TooManyPoints,
  EmptyChoiceSet,
  OracleNotLipschitz,
  DimensionMismatch,
  NotRankOne,
  PriorMismatch,
  TrivialFamily,
  Unbalanced,
  Disconnected,
  Unbounded,
  Infeasible,
  MissingBox,
  MalformedInput,
  UnknownCommand,
  // numerical
  NumericalBreakdown,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AsymmetricDistance: return "AsymmetricDistance";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::ZeroDistanceDistinctPoints: return "ZeroDistanceDistinctPoints";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::BadBaseIndex: return "BadBaseIndex";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotAPoset: return "NotAPoset";
    case ErrorCode::NotProbability: return "NotProbability";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::NegativeScale: return "NegativeScale";
    case ErrorCode::NonzeroTotalMass: return "NonzeroTotalMass";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NonNumericLabels: return "NonNumericLabels";
    case ErrorCode::TooManyPoints: return "TooManyPoints";
    case ErrorCode::EmptyChoiceSet: return "EmptyChoiceSet";
    case ErrorCode::OracleNotLipschitz: return "OracleNotLipschitz";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::PriorMismatch: return "PriorMismatch";
    case ErrorCode::TrivialFamily: return "TrivialFamily";
    case ErrorCode::Unbalanced: return "Unbalanced";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MissingBox: return "MissingBox";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "Unknown";
}

// Every failure in the library surfaces as an Error; `code()` is stable and
// is what the CLI prints, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  bool is_numerical() const noexcept { return code_ == ErrorCode::NumericalBreakdown; }

 private:
  ErrorCode code_;
};

}  // namespace krorder
