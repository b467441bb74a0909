#pragma once

#include <stdexcept>
#include <string>

namespace laglad {

enum class ErrorCode {
  GridMismatch,
  NonFinite,
  Inconsistent,
  IncompleteSpec,
  InvariantViolation,
  MissingDecomposition,
  DivisionNearZero,
  HorizonTooShort,
  UnstableParameters,
  SeedCollision,
  BracketNonzero,
  NonPositiveX,
  NotSubmartingale,
  ConfigInvalid,
  ScenarioFailure,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace laglad
