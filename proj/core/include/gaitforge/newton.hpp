#pragma once

#include <functional>

#include "gaitforge/types.hpp"

namespace gaitforge {

struct Linearization {
  Vector residual;
  Matrix jacobian;
};

struct NewtonOptions {
  double tolerance = 1e-10;  // on the max-norm of the residual
  int max_iterations = 50;
  int max_halvings = 8;
};

struct NewtonResult {
  Vector x;
  Vector residual;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton for square systems. A step is halved until the 2-norm of the
// residual decreases; after max_halvings the shortest step is taken anyway.
NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Linearization(const Vector&)>& linearize,
                          const Vector& x0, const NewtonOptions& options = {});

}  // namespace gaitforge
