#pragma once

#include <functional>
#include <vector>

#include "gaitforge/types.hpp"

namespace gaitforge {

struct ToleranceConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-10;
  int max_steps = 200000;

  void validate() const;
};

using OdeRhs = std::function<void(double t, const Vector& z, Vector& dz)>;

// Accepted step sizes of an adaptive run. Replaying them on a perturbed
// problem keeps finite-difference Jacobians free of step-selection noise.
struct StepGrid {
  double horizon = 0.0;
  std::vector<double> steps;
};

// Piecewise quartic continuous extension of a Dormand-Prince 5(4) run.
class DenseTrajectory {
 public:
  double final_time() const { return horizon_; }
  const Vector& initial_state() const { return z0_; }
  const Vector& terminal_state() const { return zT_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  StepGrid grid() const;
  int accepted_steps() const { return static_cast<int>(segments_.size()); }
  int rejected_steps() const { return rejected_; }

  // Returns stored values exactly at breakpoints.
  Vector operator()(double t) const;

 private:
  friend class Dopri5;
  struct Segment {
    double t0;
    double h;
    Vector r1, r2, r3, r4, r5;
    Vector y1;
  };
  double horizon_ = 0.0;
  Vector z0_, zT_;
  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
  int rejected_ = 0;
};

DenseTrajectory integrate_fixed_horizon(const OdeRhs& rhs, const Vector& z0, double T,
                                        const ToleranceConfig& tol = {});

// Same scheme, no error control: the steps of `grid` are rescaled by T / grid.horizon.
DenseTrajectory integrate_on_grid(const OdeRhs& rhs, const Vector& z0, double T,
                                  const StepGrid& grid);

// z' = F(t, z, theta) together with the variational equations for
// S_z0 = dz/dz0 and S_theta = dz/dtheta.
struct SensitivitySystem {
  int n_z = 0;
  int n_theta = 0;
  std::function<void(double t, const Vector& z, Vector& dz)> rhs;
  // Writes dF/dz (n_z x n_z) and dF/dtheta (n_z x n_theta).
  std::function<void(double t, const Vector& z, Matrix& Fz, Matrix& Ftheta)> jacobians;
};

struct SensitivityResult {
  Vector zT;
  Matrix S_z0;
  Matrix S_theta;
  Vector S_T;  // F(T, z(T)), derivative of z(T) with respect to the horizon
  DenseTrajectory trajectory;  // augmented state
};

SensitivityResult integrate_with_sensitivities(const SensitivitySystem& sys, const Vector& z0,
                                               double T, const ToleranceConfig& tol = {},
                                               const StepGrid* grid = nullptr);

}  // namespace gaitforge
