#pragma once

#include <string>

#include "gaitforge/bases.hpp"
#include "gaitforge/indirect.hpp"

namespace gaitforge {

// chi_hat = (T, x0, xi, lambda_hat); the primal block s = (T, x0, xi).
struct DirectLayout {
  int n_x, n_xi, n_h;

  DirectLayout(const OcpDimensions& d, int n_xi_) : n_x(d.n_x), n_xi(n_xi_), n_h(d.n_h()) {}

  int primal() const { return 1 + n_x + n_xi; }
  int constraints() const { return n_x + n_h; }
  int size() const { return primal() + constraints(); }

  int T() const { return 0; }
  int x0() const { return 1; }
  int xi() const { return 1 + n_x; }
  int lambda() const { return primal(); }
};

struct DirectDecision {
  double T = 0.0;
  Vector x0;
  Vector xi;
  Vector lambda_hat;

  Vector flatten() const;
  static DirectDecision unflatten(const Vector& v, const OcpDimensions& d, int n_xi);
};

struct DirectEvaluation {
  Vector residual;     // [grad c + grad h^T lambda; h_hat]
  double cost = 0.0;
  Vector grad_cost;    // n_s
  Vector h_hat;        // [g(x(T)) - x0; h]
  Matrix grad_h;       // n_hh x n_s
  DenseTrajectory trajectory;  // augmented with sensitivities
};

enum class StationaryKind { kStrictMinimum, kMinimum, kSaddle };

std::string to_string(StationaryKind k);

struct Classification {
  StationaryKind kind = StationaryKind::kSaddle;
  double min_eigenvalue = 0.0;
  Vector eigenvalues;
};

class DirectShooting {
 public:
  DirectShooting(const ParameterizedOcp& ocp, InputBasis basis, ShootingOptions options = {});

  const ParameterizedOcp& ocp() const { return *ocp_; }
  const InputBasis& basis() const { return basis_; }
  const ShootingOptions& options() const { return options_; }
  DirectLayout layout() const { return DirectLayout(ocp_->dimensions(), basis_.size()); }

  DirectEvaluation evaluate(const DirectDecision& chi, const Vector& sigma,
                            const StepGrid* grid = nullptr) const;
  Vector residual(const DirectDecision& chi, const Vector& sigma) const;
  JacobianResult jacobian(const DirectDecision& chi, const Vector& sigma,
                          std::vector<int> sigma_columns = {}) const;

  // Least-squares fit of xi to samples u(t_k) on [0, T].
  Vector project_input(const std::function<double(double)>& u, double T, int samples = 400) const;
  // lambda_hat minimizing |grad c + grad h^T lambda| at the primal point of chi.
  Vector least_squares_multipliers(const DirectDecision& chi, const Vector& sigma) const;

 private:
  const ParameterizedOcp* ocp_;
  InputBasis basis_;
  ShootingOptions options_;
};

Vector direct_residual(const ParameterizedOcp& ocp, const InputBasis& basis,
                       const DirectDecision& chi, const Vector& sigma,
                       const ShootingOptions& options = {});
JacobianResult direct_jacobian(const ParameterizedOcp& ocp, const InputBasis& basis,
                               const DirectDecision& chi, const Vector& sigma,
                               const ShootingOptions& options = {});

// Sign of the Hessian of the Lagrangian on the null space of grad_h.
// grad_h is n_hh x n_s, hessian n_s x n_s. zero_tol is relative to the
// largest projected eigenvalue magnitude.
Classification classify_stationary_point(const Matrix& grad_h, const Matrix& hessian,
                                         double zero_tol = 1e-7);
// Reads both blocks from a direct Jacobian.
Classification classify_from_jacobian(const Matrix& R, const DirectLayout& layout,
                                      double zero_tol = 1e-7);

}  // namespace gaitforge
