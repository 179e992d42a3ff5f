#pragma once

#include <stdexcept>
#include <string>

#include "gaitforge/types.hpp"

namespace gaitforge {

enum class ErrorCode {
  kContractViolation,
  kDomain,
  kSingularCost,
  kSingularMassMatrix,
  kSingularImpact,
  kNonConvergence,
  kDivergence,
  kSingularElimination,
  kObservabilityFailure,
  kSeedFailure,
  kSeedInconsistency,
  kSingularPoint,
  kDirectionUndefined,
  kRegularityViolation,
};

const char* to_string(ErrorCode code);

// Every numerical failure in the library surfaces as a GaitError. The payload
// carries whatever vector is most useful for diagnosis (a residual, usually).
class GaitError : public std::runtime_error {
 public:
  GaitError(ErrorCode code, const std::string& message, Vector payload = {});

  ErrorCode code() const { return code_; }
  const Vector& payload() const { return payload_; }

 private:
  ErrorCode code_;
  Vector payload_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message, Vector payload = {});

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kContractViolation, message);
}

}  // namespace gaitforge
