#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helios {

enum class ErrorCode {
  validation,
  parse,
  schema,
  empty_month,
  degenerate_data,
  size_limit,
  missing_scenario_set,
  inconsistent_dimensions,
  dimension_mismatch,
  budget_not_derived,
  objective_not_separable,
  iteration_limit,
  backend_unavailable,
  numerical_failure,
  infeasible_residual,
  insufficient_days,
  horizon_mismatch,
  zero_baseline,
  not_found,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::validation: return "ValidationError";
    case ErrorCode::parse: return "ParseError";
    case ErrorCode::schema: return "SchemaError";
    case ErrorCode::empty_month: return "EmptyMonth";
    case ErrorCode::degenerate_data: return "DegenerateData";
    case ErrorCode::size_limit: return "SizeLimit";
    case ErrorCode::missing_scenario_set: return "MissingScenarioSet";
    case ErrorCode::inconsistent_dimensions: return "InconsistentDimensions";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::budget_not_derived: return "BudgetNotDerived";
    case ErrorCode::objective_not_separable: return "ObjectiveNotSeparable";
    case ErrorCode::iteration_limit: return "IterationLimit";
    case ErrorCode::backend_unavailable: return "BackendUnavailable";
    case ErrorCode::numerical_failure: return "NumericalFailure";
    case ErrorCode::infeasible_residual: return "InfeasibleResidual";
    case ErrorCode::insufficient_days: return "InsufficientDays";
    case ErrorCode::horizon_mismatch: return "HorizonMismatch";
    case ErrorCode::zero_baseline: return "ZeroBaseline";
    case ErrorCode::not_found: return "NotFound";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace helios
