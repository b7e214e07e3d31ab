#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rearr {

enum class ErrorCode {
  InvalidArgument,
  NegativeInput,
  IrregularLevel,
  SyntaxError,
  UnknownIdentifier,
  ArityError,
  UnboundVariable,
  DomainError,
  NegativeWeight,
  EmptyU,
  NonConvergent,
  PreconditionFailed,
  InfeasibleSpec,
  DegenerateBound,
  AlphaOutOfRange,
  ThresholdTooSmall,
  GeneratorStall,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::IrregularLevel: return "IrregularLevel";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::EmptyU: return "EmptyU";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::DegenerateBound: return "DegenerateBound";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::ThresholdTooSmall: return "ThresholdTooSmall";
    case ErrorCode::GeneratorStall: return "GeneratorStall";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parser failures additionally record the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error(ErrorCode::SyntaxError, what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace rearr
