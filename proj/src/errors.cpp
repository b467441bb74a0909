#include "laglad/errors.hpp"

namespace laglad {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::IncompleteSpec: return "IncompleteSpec";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::MissingDecomposition: return "MissingDecomposition";
    case ErrorCode::DivisionNearZero: return "DivisionNearZero";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::UnstableParameters: return "UnstableParameters";
    case ErrorCode::SeedCollision: return "SeedCollision";
    case ErrorCode::BracketNonzero: return "BracketNonzero";
    case ErrorCode::NonPositiveX: return "NonPositiveX";
    case ErrorCode::NotSubmartingale: return "NotSubmartingale";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ScenarioFailure: return "ScenarioFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace laglad
