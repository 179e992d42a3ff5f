#include "gaitforge/curves.hpp"

#include "gaitforge/error.hpp"

namespace gaitforge {

namespace {

Vector with_parameter(const Vector& base, int index, double value) {
  Vector s = base;
  s(index) = value;
  return s;
}

}  // namespace

CurveFunctions indirect_curve(const IndirectShooting& shooting, const Vector& base, int index) {
  const OcpDimensions d = shooting.ocp().dimensions();
  const int N = shooting.layout().size();
  require(index >= 0 && index < d.n_sigma, "continuation parameter out of range");
  CurveFunctions fns;
  fns.residual = [&shooting, base, index, N, d](const Vector& nu) {
    return shooting.residual(IndirectDecision::unflatten(nu.head(N), d), with_parameter(base, index, nu(N)));
  };
  fns.linearize = [&shooting, base, index, N, d](const Vector& nu) {
    const JacobianResult j = shooting.jacobian(IndirectDecision::unflatten(nu.head(N), d),
                                               with_parameter(base, index, nu(N)), {index});
    return Linearization{j.residual, j.R_sigma};
  };
  return fns;
}

CurveFunctions direct_curve(const DirectShooting& shooting, const Vector& base, int index) {
  const OcpDimensions d = shooting.ocp().dimensions();
  const int N = shooting.layout().size();
  const int nxi = shooting.basis().size();
  require(index >= 0 && index < d.n_sigma, "continuation parameter out of range");
  CurveFunctions fns;
  fns.residual = [&shooting, base, index, N, d, nxi](const Vector& nu) {
    return shooting.residual(DirectDecision::unflatten(nu.head(N), d, nxi), with_parameter(base, index, nu(N)));
  };
  fns.linearize = [&shooting, base, index, N, d, nxi](const Vector& nu) {
    const JacobianResult j = shooting.jacobian(DirectDecision::unflatten(nu.head(N), d, nxi),
                                               with_parameter(base, index, nu(N)), {index});
    return Linearization{j.residual, j.R_sigma};
  };
  return fns;
}

DirectDecision project_indirect(const DirectShooting& direct, const IndirectShooting& indirect,
                                const IndirectDecision& chi, const Vector& sigma) {
  const IndirectTrajectory traj = indirect.trajectory(chi, sigma);
  DirectDecision out;
  out.T = chi.T;
  out.x0 = chi.x0;
  out.xi = direct.project_input([&](double t) { return traj.at(t).u(0); }, chi.T);
  out.lambda_hat = Vector::Zero(direct.layout().constraints());
  out.lambda_hat = direct.least_squares_multipliers(out, sigma);
  return out;
}

NewtonResult solve_direct(const DirectShooting& direct, const DirectDecision& guess,
                          const Vector& sigma, const NewtonOptions& options) {
  const OcpDimensions d = direct.ocp().dimensions();
  const int nxi = direct.basis().size();
  auto residual = [&](const Vector& v) {
    return direct.residual(DirectDecision::unflatten(v, d, nxi), sigma);
  };
  auto linearize = [&](const Vector& v) {
    const JacobianResult j = direct.jacobian(DirectDecision::unflatten(v, d, nxi), sigma);
    return Linearization{j.residual, j.R};
  };
  return newton_solve(residual, linearize, guess.flatten(), options);
}

}  // namespace gaitforge
