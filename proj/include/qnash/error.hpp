#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnash {

enum class ErrorCode {
  kNormMismatch,
  kBasisMismatch,
  kIndexOutOfRange,
  kNotUnitary,
  kDimensionMismatch,
  kNotBimatrix,
  kDomainError,
  kNoInteriorSolution,
  kBeliefMismatch,
  kInfeasibleBudget,
  kNoInteriorOptimum,
  kPreconditionViolation,
  kParseError,
  kValidationError,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception. `field` carries a JSON-style
// field path for validation errors and is empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace qnash
