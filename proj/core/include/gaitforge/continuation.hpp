#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gaitforge/newton.hpp"

namespace gaitforge {

// Underdetermined zero problem r(nu) = 0 with nu = (chi, sigma_c). The last
// component of nu is always the continuation parameter.
struct CurveFunctions {
  std::function<Vector(const Vector&)> residual;
  std::function<Linearization(const Vector&)> linearize;  // N x (N+1)
};

struct ContinuationConfig {
  double h0 = 0.01;
  double h_min = 1e-6;
  double h_max = 0.1;
  double newton_tol = 1e-8;
  int max_newton_iterations = 8;
  int max_steps = 2000;
  int fast_iterations = 2;     // corrector iterations that count as fast
  int fast_streak = 3;         // fast successes before growing h
  double grow_factor = 1.5;
  double sigma_end = 0.0;

  void validate() const;
};

struct CurvePoint {
  Vector nu;
  Vector tangent;
  double residual_norm = 0.0;
  int newton_iterations = 0;
  double step = 0.0;  // h used to reach this point, 0 for the seed
  bool turning_point_before = false;
};

enum class Termination { kReachedEnd, kMaxSteps, kStalled, kSingularPoint, kBranchSwitch };

std::string to_string(Termination t);

struct ProgressRecord {
  int step = 0;
  double sigma = 0.0;
  double h = 0.0;
  double residual_norm = 0.0;
  int newton_iterations = 0;
  bool accepted = false;
};

struct GaitLibrary {
  std::vector<CurvePoint> points;
  std::vector<int> turning_points;  // index of the point after each sign change
  Termination termination = Termination::kMaxSteps;
  std::string message;
  double direction = 1.0;
  int rejected_steps = 0;
};

// Unit null vector of R (N x (N+1)) with det([R; tau^T]) > 0.
Vector tangent(const Matrix& R);
double orientation_determinant(const Matrix& R, const Vector& tau);

Vector predict(const Vector& nu, const Vector& tau, double h, double direction);

struct CorrectorOutcome {
  bool converged = false;
  CurvePoint point;
  Matrix jacobian;  // at the converged point
  std::string reason;
};

// Newton on [r(nu); tau_pred^T (nu - nu_pred)] = 0 with tau_pred frozen.
CorrectorOutcome correct(const CurveFunctions& fns, const Vector& nu_pred, const Vector& tau_pred,
                         const ContinuationConfig& config);

// sign(sigma_end - sigma_start) * sign(tau_sigma).
double initial_direction(double sigma_start, double sigma_end, const Vector& tau);

// Solves [r(nu); c^T nu - target] = 0 starting from `guess`.
NewtonResult locate_on_curve(const CurveFunctions& fns, const Vector& guess, const Vector& c,
                             double target, const NewtonOptions& options);

GaitLibrary run_continuation(const CurveFunctions& fns, const Vector& nu_seed,
                             const ContinuationConfig& config,
                             const std::function<void(const ProgressRecord&)>& progress = {});

}  // namespace gaitforge
