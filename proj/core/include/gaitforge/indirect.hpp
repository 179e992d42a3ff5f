#pragma once

#include <vector>

#include "gaitforge/integrate.hpp"
#include "gaitforge/ocp.hpp"

namespace gaitforge {

struct FiniteDifferenceOptions {
  double step = 1e-9;
  bool central = false;
};

struct ShootingOptions {
  ToleranceConfig tolerances;
  FiniteDifferenceOptions fd;
};

// Offsets of the decision vector chi = (T, x0, p0, q, u0, lambda) and of the
// residual blocks, in that order.
struct IndirectLayout {
  int n_x, n_u, n_omega;

  explicit IndirectLayout(const OcpDimensions& d) : n_x(d.n_x), n_u(d.n_u), n_omega(d.n_omega) {}

  int size() const { return 2 * n_x + n_u + n_omega + 3; }

  int T() const { return 0; }
  int x0() const { return 1; }
  int p0() const { return 1 + n_x; }
  int q() const { return 1 + 2 * n_x; }
  int u0() const { return 2 + 2 * n_x; }
  int lambda() const { return 2 + 2 * n_x + n_u; }

  int r_transversality_T() const { return 0; }
  int r_transversality_x() const { return 1; }
  int r_multiplier() const { return 1 + n_x; }
  int r_input() const { return 2 + n_x; }
  int r_periodicity() const { return 2 + n_x + n_u; }
  int r_constraints() const { return 2 + 2 * n_x + n_u; }
};

struct IndirectDecision {
  double T = 0.0;
  Vector x0;
  Vector p0;
  double q = 0.0;
  Vector u0;
  Vector lambda;

  Vector flatten() const;
  static IndirectDecision unflatten(const Vector& chi, const OcpDimensions& d);
};

// w = (x, y, p, q) with the eliminated input attached.
struct ExtendedState {
  Vector x;
  double y = 0.0;
  Vector p;
  double q = 0.0;
  Vector u;
};

double hamiltonian(const ParameterizedOcp& ocp, const Vector& x, const Vector& u, const Vector& p,
                   double q, const Vector& sigma);
Vector eliminate_input(const ParameterizedOcp& ocp, const Vector& x, const Vector& p, double q,
                       const Vector& sigma);
// Time derivative of (x, y, p); q is constant.
Vector extended_rhs(const ParameterizedOcp& ocp, const Vector& z, double q, const Vector& sigma);

class IndirectTrajectory {
 public:
  IndirectTrajectory(const ParameterizedOcp& ocp, DenseTrajectory traj, double q, Vector sigma);

  double final_time() const { return traj_.final_time(); }
  ExtendedState at(double t) const;
  double hamiltonian_at(double t) const;
  const DenseTrajectory& dense() const { return traj_; }

 private:
  const ParameterizedOcp* ocp_;
  DenseTrajectory traj_;
  double q_;
  Vector sigma_;
};

struct IndirectEvaluation {
  Vector residual;
  DenseTrajectory trajectory;  // of (x, y, p)
  double cost = 0.0;
};

struct JacobianResult {
  Vector residual;
  Matrix R;        // N x N
  Matrix R_sigma;  // N x (N + number of requested parameter columns)
};

class IndirectShooting {
 public:
  IndirectShooting(const ParameterizedOcp& ocp, ShootingOptions options = {});

  const ParameterizedOcp& ocp() const { return *ocp_; }
  const ShootingOptions& options() const { return options_; }
  IndirectLayout layout() const { return IndirectLayout(ocp_->dimensions()); }

  IndirectEvaluation evaluate(const IndirectDecision& chi, const Vector& sigma,
                              const StepGrid* grid = nullptr) const;
  Vector residual(const IndirectDecision& chi, const Vector& sigma) const;
  IndirectTrajectory trajectory(const IndirectDecision& chi, const Vector& sigma) const;

  // Finite-difference Jacobian. Perturbed columns replay the step grid of the
  // nominal solve. `sigma_columns` selects which parameters get a column;
  // empty means all.
  JacobianResult jacobian(const IndirectDecision& chi, const Vector& sigma,
                          std::vector<int> sigma_columns = {}) const;

 private:
  const ParameterizedOcp* ocp_;
  ShootingOptions options_;
};

Vector indirect_residual(const ParameterizedOcp& ocp, const IndirectDecision& chi,
                         const Vector& sigma, const ShootingOptions& options = {});
JacobianResult indirect_jacobian(const ParameterizedOcp& ocp, const IndirectDecision& chi,
                                 const Vector& sigma, const ShootingOptions& options = {});

// Column-wise finite differences of r about x0. `eval_at` receives the
// perturbed point and returns the residual there.
Matrix finite_difference_columns(const std::function<Vector(const Vector&)>& eval_at,
                                 const Vector& x0, const Vector& r0, const std::vector<int>& columns,
                                 const FiniteDifferenceOptions& fd);

}  // namespace gaitforge
