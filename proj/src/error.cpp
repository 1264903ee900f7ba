#include "qnash/error.hpp"

namespace qnash {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNormMismatch: return "NORM_MISMATCH";
    case ErrorCode::kBasisMismatch: return "BASIS_MISMATCH";
    case ErrorCode::kIndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::kNotUnitary: return "NOT_UNITARY";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kNotBimatrix: return "NOT_BIMATRIX";
    case ErrorCode::kDomainError: return "DOMAIN_ERROR";
    case ErrorCode::kNoInteriorSolution: return "NO_INTERIOR_SOLUTION";
    case ErrorCode::kBeliefMismatch: return "BELIEF_MISMATCH";
    case ErrorCode::kInfeasibleBudget: return "INFEASIBLE_BUDGET";
    case ErrorCode::kNoInteriorOptimum: return "NO_INTERIOR_OPTIMUM";
    case ErrorCode::kPreconditionViolation: return "PRECONDITION_VIOLATION";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kValidationError: return "VALIDATION_ERROR";
  }
  return "UNKNOWN";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           const std::string& field) {
  std::string out{to_string(code)};
  if (!field.empty()) out += " at '" + field + "'";
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string field)
    : std::runtime_error(format_message(code, message, field)),
      code_(code),
      field_(std::move(field)) {}

}  // namespace qnash
