#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaitforge/types.hpp"

namespace gaitforge {

struct OcpDimensions {
  int n_x = 0;
  int n_u = 0;
  int n_omega = 0;
  int n_sigma = 0;

  int n_h() const { return 1 + n_omega; }
};

struct DynamicsPartials {
  Matrix fx;  // n_x x n_x
  Matrix fu;  // n_x x n_u
};

struct StagePartials {
  Vector lx;
  Vector lu;
};

struct BoundaryPartials {
  Vector dT;   // n_h
  Matrix dxT;  // n_h x n_x
  Matrix dx0;  // n_h x n_x
};

struct CostPartials {
  double dT = 0.0;
  Vector dxT;
  double dyT = 0.0;
};

// h = [e; omega], event first.
struct BoundaryConstraint {
  Vector values;

  double event() const { return values(0); }
  Vector operating() const { return values.tail(values.size() - 1); }
};

// A periodic hybrid optimal control problem with a parameter vector sigma.
// Models override the maps; partials fall back to central differences.
// Implementations must be pure: the library evaluates them from several threads.
class ParameterizedOcp {
 public:
  virtual ~ParameterizedOcp() = default;

  virtual std::string name() const = 0;
  virtual OcpDimensions dimensions() const = 0;
  virtual std::vector<std::string> parameter_names() const;
  virtual Vector nominal_parameters() const;
  // Box used when probing partials, as (lower, upper).
  virtual std::pair<Vector, Vector> probe_box() const;

  virtual Vector f(const Vector& x, const Vector& u, const Vector& sigma) const = 0;
  virtual Vector g(const Vector& x, const Vector& sigma) const = 0;
  virtual double e(double T, const Vector& xT, const Vector& x0, const Vector& sigma) const = 0;
  virtual Vector omega(double T, const Vector& xT, const Vector& x0, const Vector& sigma) const = 0;
  virtual double l(const Vector& x, const Vector& u, const Vector& sigma) const = 0;
  virtual double c(double T, const Vector& xT, double yT, const Vector& sigma) const = 0;

  virtual DynamicsPartials f_partials(const Vector& x, const Vector& u, const Vector& sigma) const;
  virtual StagePartials l_partials(const Vector& x, const Vector& u, const Vector& sigma) const;
  virtual Matrix g_partial(const Vector& x, const Vector& sigma) const;
  virtual BoundaryPartials h_partials(double T, const Vector& xT, const Vector& x0,
                                      const Vector& sigma) const;
  virtual CostPartials c_partials(double T, const Vector& xT, double yT, const Vector& sigma) const;

  // Weight k when l = (k/2)|u|^2 + l0(x) and f is affine in u; enables
  // closed-form input elimination.
  virtual std::optional<double> quadratic_input_weight(const Vector& sigma) const;

  Vector h(double T, const Vector& xT, const Vector& x0, const Vector& sigma) const;
};

namespace fd {

double step_for(double value);

DynamicsPartials f_partials(const ParameterizedOcp& ocp, const Vector& x, const Vector& u,
                            const Vector& sigma);
StagePartials l_partials(const ParameterizedOcp& ocp, const Vector& x, const Vector& u,
                         const Vector& sigma);
Matrix g_partial(const ParameterizedOcp& ocp, const Vector& x, const Vector& sigma);
BoundaryPartials h_partials(const ParameterizedOcp& ocp, double T, const Vector& xT,
                            const Vector& x0, const Vector& sigma);
CostPartials c_partials(const ParameterizedOcp& ocp, double T, const Vector& xT, double yT,
                        const Vector& sigma);

}  // namespace fd

BoundaryConstraint eval_h(const ParameterizedOcp& ocp, double T, const Vector& xT,
                          const Vector& x0, const Vector& sigma);
double eval_cost(const ParameterizedOcp& ocp, double T, const Vector& xT, double yT,
                 const Vector& sigma);

struct PartialCheck {
  std::string name;
  double max_rel_error = 0.0;
  bool passed = true;
};

struct DiagnosticReport {
  std::vector<PartialCheck> checks;
  std::vector<std::string> issues;

  bool ok() const;
  bool flagged(std::string_view partial) const;
};

struct ValidationOptions {
  int probes = 20;
  double tolerance = 1e-5;
  unsigned seed = 7;
};

// Compares every supplied partial against central differences at random
// probe points and checks dimensions and repeatability.
DiagnosticReport validate_ocp(const ParameterizedOcp& ocp, const ValidationOptions& options = {});

// max |a - b| scaled by the largest entry of b (or 1e-12 when b vanishes).
double scaled_max_error(const Matrix& a, const Matrix& b);

}  // namespace gaitforge
