#include "gaitforge/error.hpp"

namespace gaitforge {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kContractViolation: return "contract-violation";
    case ErrorCode::kDomain: return "domain-error";
    case ErrorCode::kSingularCost: return "singular-cost";
    case ErrorCode::kSingularMassMatrix: return "singular-mass-matrix";
    case ErrorCode::kSingularImpact: return "singular-impact";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kSingularElimination: return "singular-elimination";
    case ErrorCode::kObservabilityFailure: return "observability-failure";
    case ErrorCode::kSeedFailure: return "seed-failure";
    case ErrorCode::kSeedInconsistency: return "seed-inconsistency";
    case ErrorCode::kSingularPoint: return "singular-point";
    case ErrorCode::kDirectionUndefined: return "direction-undefined";
    case ErrorCode::kRegularityViolation: return "regularity-violation";
  }
  return "unknown";
}

GaitError::GaitError(ErrorCode code, const std::string& message, Vector payload)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      payload_(std::move(payload)) {}

void fail(ErrorCode code, const std::string& message, Vector payload) {
  throw GaitError(code, message, std::move(payload));
}

}  // namespace gaitforge
