#pragma once

#include <string>
#include <vector>

#include "gaitforge/indirect.hpp"

namespace gaitforge {

struct PassiveGaitRequest {
  Vector sigma;        // fixed parameter values; sigma(free_index) is the initial guess
  int free_index = 0;  // parameter solved for together with (T, x0)
  double T_guess = 0.0;
  Vector x0_guess;
  std::string branch_tag;
};

struct PassiveSearchOptions {
  ToleranceConfig tolerances;
  double residual_tol = 1e-10;
  int max_iterations = 50;
  int max_halvings = 8;
  double T_min = 0.1;
  double fd_step = 1e-8;
};

struct PassiveGait {
  double T = 0.0;
  Vector x0;
  Vector sigma;
  int free_index = 0;
  std::string branch_tag;
  double residual_norm = 0.0;
  int iterations = 0;
};

// [g(x(T)) - x0; h(T, x(T), x0)] along the unforced flow.
Vector passive_residual(const ParameterizedOcp& ocp, double T, const Vector& x0, const Vector& sigma,
                        const ToleranceConfig& tol = {}, const StepGrid* grid = nullptr);

PassiveGait find_passive_gait(const ParameterizedOcp& ocp, const PassiveGaitRequest& request,
                              const PassiveSearchOptions& options = {});

// Moves a passive gait in sigma(sweep_index) to `target` in equal increments,
// re-solving with secant extrapolation at each increment.
PassiveGait sweep_passive_gait(const ParameterizedOcp& ocp, const PassiveGait& start,
                               int sweep_index, double target, int increments,
                               const PassiveSearchOptions& options = {});

// Terminal-cost sensitivity dc/dy_T on the passive gait; the multiplier q.
double reconstruct_q(const ParameterizedOcp& ocp, const PassiveGait& passive,
                     const ToleranceConfig& tol = {});

// Rows of H_u and its time derivatives along the unforced flow, written as
// A_tilde p = b_tilde q. b_tilde holds the negated input-cost rows so that
// p = A^-1 b q on the selected rows.
struct ObservabilityStack {
  Matrix A_tilde;
  Vector b_tilde;
  std::vector<int> selected_rows;
  Matrix A;
  Vector b;
  int depth = 0;
  double scaled_det = 0.0;  // |det| of the selected rows after normalization
};

struct ObservabilityOptions {
  double window = 0.25;  // half-width of the sampling window in time
  int nodes = 16;        // Chebyshev degree
  ToleranceConfig tolerances{1e-12, 1e-14, 200000};
  double det_threshold = 1e-12;
};

// Derivatives of order 0..depth-1. Throws ObservabilityFailure when no
// nonsingular n_x-row selection exists.
ObservabilityStack build_observability_stack(const ParameterizedOcp& ocp, const Vector& x, double q,
                                             const Vector& sigma, int depth,
                                             const ObservabilityOptions& options = {});
// Smallest depth that yields n_x independent rows, up to 2 n_x.
ObservabilityStack build_observability_stack(const ParameterizedOcp& ocp, const Vector& x, double q,
                                             const Vector& sigma,
                                             const ObservabilityOptions& options = {});

// Greedy volume-maximizing row choice on unit-normalized rows, ties to the
// lowest index. Returns the chosen rows and |det| of their normalized block.
std::pair<std::vector<int>, double> select_rows(const Matrix& rows, int count);

Vector reconstruct_costate(const ObservabilityStack& stack, double q);

struct LambdaReconstruction {
  Vector lambda;
  int rank = 0;
  Vector singular_values;
};

LambdaReconstruction reconstruct_lambda(const ParameterizedOcp& ocp, const PassiveGait& passive,
                                        const Vector& p0, const Vector& pT, double yT,
                                        const ToleranceConfig& tol = {});

struct SeedDiagnostics {
  Vector residual;
  double residual_norm = 0.0;
  double costate_mismatch = 0.0;  // |p(T) reconstructed - p(T) integrated|
  int lambda_rank = 0;
  int stack_depth = 0;
  std::vector<int> selected_rows;
};

struct IndirectSeed {
  IndirectDecision chi;
  Vector sigma;
  PassiveGait passive;
  SeedDiagnostics diagnostics;
};

struct SeedOptions {
  double consistency_tol = 1e-8;
  ObservabilityOptions observability;
};

IndirectSeed seed_from_passive(const ParameterizedOcp& ocp, const PassiveGait& passive,
                               const ShootingOptions& shooting = {}, const SeedOptions& options = {});

// Derivatives of order 0..max_order at the center of [-delta, delta] of a
// function sampled at the Chebyshev-Lobatto nodes t_j = delta cos(j pi / n).
// `samples` has one row per node; the result has one row per order.
Matrix chebyshev_center_derivatives(const Matrix& samples, int max_order, double delta);

}  // namespace gaitforge
