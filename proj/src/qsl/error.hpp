#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

enum class ErrorCode {
  InvalidArgument,
  DimMismatch,
  TruncationLeak,
  InvalidSpec,
  StepFailure,
  NotReached,
  ConvergenceFailure,
  DimTooSmall,
  BelowBifurcation,
  GridTooSmall,
  GridTooCoarse,
  GridMismatch,
  NotNormalized,
  DimTooLarge,
  MissingCoefficients,
  ConfigError,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qsl
