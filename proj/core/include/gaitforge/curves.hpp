#pragma once

#include "gaitforge/continuation.hpp"
#include "gaitforge/direct.hpp"
#include "gaitforge/indirect.hpp"

namespace gaitforge {

// nu = (chi, sigma(index)); the other parameters stay at their `base` values.
CurveFunctions indirect_curve(const IndirectShooting& shooting, const Vector& base, int index);
CurveFunctions direct_curve(const DirectShooting& shooting, const Vector& base, int index);

// Least-squares projection of the indirect input onto the basis, followed by
// least-squares multipliers.
DirectDecision project_indirect(const DirectShooting& direct, const IndirectShooting& indirect,
                                const IndirectDecision& chi, const Vector& sigma);

// Damped Newton on the square direct residual at fixed sigma.
NewtonResult solve_direct(const DirectShooting& direct, const DirectDecision& guess,
                          const Vector& sigma, const NewtonOptions& options = {});

}  // namespace gaitforge
