#include "gaitforge/indirect.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gaitforge/error.hpp"
#include "gaitforge/parallel.hpp"

namespace gaitforge {

Vector IndirectDecision::flatten() const {
  const int n_x = static_cast<int>(x0.size());
  const int n_u = static_cast<int>(u0.size());
  const int n_l = static_cast<int>(lambda.size());
  Vector chi(2 * n_x + n_u + n_l + 2);
  chi << T, x0, p0, q, u0, lambda;
  return chi;
}

IndirectDecision IndirectDecision::unflatten(const Vector& chi, const OcpDimensions& d) {
  const IndirectLayout L(d);
  require(chi.size() == L.size(), "decision vector has length " + std::to_string(chi.size()) +
                                      ", expected " + std::to_string(L.size()));
  IndirectDecision out;
  out.T = chi(L.T());
  out.x0 = chi.segment(L.x0(), d.n_x);
  out.p0 = chi.segment(L.p0(), d.n_x);
  out.q = chi(L.q());
  out.u0 = chi.segment(L.u0(), d.n_u);
  out.lambda = chi.segment(L.lambda(), d.n_h());
  return out;
}

double hamiltonian(const ParameterizedOcp& ocp, const Vector& x, const Vector& u, const Vector& p,
                   double q, const Vector& sigma) {
  return p.dot(ocp.f(x, u, sigma)) + q * ocp.l(x, u, sigma);
}

Vector eliminate_input(const ParameterizedOcp& ocp, const Vector& x, const Vector& p, double q,
                       const Vector& sigma) {
  const auto k = ocp.quadratic_input_weight(sigma);
  if (!k) fail(ErrorCode::kSingularElimination, "model does not admit closed-form input elimination");
  const double denom = *k * q;
  if (!(std::abs(denom) > 1e-14)) {
    fail(ErrorCode::kSingularElimination, "k*q vanishes, stationarity cannot be solved for u");
  }
  const int n_u = ocp.dimensions().n_u;
  const Matrix fu = ocp.f_partials(x, Vector::Zero(n_u), sigma).fu;
  return -(fu.transpose() * p) / denom;
}

Vector extended_rhs(const ParameterizedOcp& ocp, const Vector& z, double q, const Vector& sigma) {
  const int n = ocp.dimensions().n_x;
  const Vector x = z.head(n);
  const Vector p = z.tail(n);
  const Vector u = eliminate_input(ocp, x, p, q, sigma);
  const DynamicsPartials fp = ocp.f_partials(x, u, sigma);
  const StagePartials lp = ocp.l_partials(x, u, sigma);
  Vector dz(2 * n + 1);
  dz.head(n) = ocp.f(x, u, sigma);
  dz(n) = ocp.l(x, u, sigma);
  dz.tail(n) = -fp.fx.transpose() * p - q * lp.lx;
  return dz;
}

IndirectTrajectory::IndirectTrajectory(const ParameterizedOcp& ocp, DenseTrajectory traj, double q,
                                       Vector sigma)
    : ocp_(&ocp), traj_(std::move(traj)), q_(q), sigma_(std::move(sigma)) {}

ExtendedState IndirectTrajectory::at(double t) const {
  const int n = ocp_->dimensions().n_x;
  const Vector z = traj_(t);
  ExtendedState w;
  w.x = z.head(n);
  w.y = z(n);
  w.p = z.tail(n);
  w.q = q_;
  w.u = eliminate_input(*ocp_, w.x, w.p, q_, sigma_);
  return w;
}

double IndirectTrajectory::hamiltonian_at(double t) const {
  const ExtendedState w = at(t);
  return hamiltonian(*ocp_, w.x, w.u, w.p, w.q, sigma_);
}

IndirectShooting::IndirectShooting(const ParameterizedOcp& ocp, ShootingOptions options)
    : ocp_(&ocp), options_(options) {
  options_.tolerances.validate();
}

IndirectEvaluation IndirectShooting::evaluate(const IndirectDecision& chi, const Vector& sigma,
                                              const StepGrid* grid) const {
  const OcpDimensions d = ocp_->dimensions();
  const IndirectLayout L(d);
  require(chi.x0.size() == d.n_x && chi.p0.size() == d.n_x && chi.u0.size() == d.n_u &&
              chi.lambda.size() == d.n_h(),
          "indirect decision has inconsistent block sizes");
  require(sigma.size() == d.n_sigma, "parameter vector has wrong length");
  if (!(chi.T > 0.0)) fail(ErrorCode::kDomain, "horizon T must be positive");

  const int n = d.n_x;
  Vector z0(2 * n + 1);
  z0 << chi.x0, 0.0, chi.p0;
  const double q = chi.q;
  OdeRhs rhs = [&](double, const Vector& z, Vector& dz) { dz = extended_rhs(*ocp_, z, q, sigma); };

  IndirectEvaluation out;
  out.trajectory = grid ? integrate_on_grid(rhs, z0, chi.T, *grid)
                        : integrate_fixed_horizon(rhs, z0, chi.T, options_.tolerances);
  const Vector& zT = out.trajectory.terminal_state();
  const Vector xT = zT.head(n);
  const double yT = zT(n);
  const Vector pT = zT.tail(n);
  const Vector uT = eliminate_input(*ocp_, xT, pT, q, sigma);

  const CostPartials cp = ocp_->c_partials(chi.T, xT, yT, sigma);
  const BoundaryPartials hp = ocp_->h_partials(chi.T, xT, chi.x0, sigma);
  const Matrix gx = ocp_->g_partial(xT, sigma);
  const DynamicsPartials fp0 = ocp_->f_partials(chi.x0, chi.u0, sigma);
  const StagePartials lp0 = ocp_->l_partials(chi.x0, chi.u0, sigma);

  Vector& r = out.residual;
  r.resize(L.size());
  r(L.r_transversality_T()) =
      hamiltonian(*ocp_, xT, uT, pT, q, sigma) + cp.dT + chi.lambda.dot(hp.dT);
  r.segment(L.r_transversality_x(), n) = gx.transpose() * (chi.p0 + hp.dx0.transpose() * chi.lambda) -
                                         pT + cp.dxT + hp.dxT.transpose() * chi.lambda;
  r(L.r_multiplier()) = q - cp.dyT;
  r.segment(L.r_input(), d.n_u) = fp0.fu.transpose() * chi.p0 + q * lp0.lu;
  r.segment(L.r_periodicity(), n) = ocp_->g(xT, sigma) - chi.x0;
  r.segment(L.r_constraints(), d.n_h()) = ocp_->h(chi.T, xT, chi.x0, sigma);
  out.cost = ocp_->c(chi.T, xT, yT, sigma);
  return out;
}

Vector IndirectShooting::residual(const IndirectDecision& chi, const Vector& sigma) const {
  return evaluate(chi, sigma).residual;
}

IndirectTrajectory IndirectShooting::trajectory(const IndirectDecision& chi,
                                                const Vector& sigma) const {
  return IndirectTrajectory(*ocp_, evaluate(chi, sigma).trajectory, chi.q, sigma);
}

Matrix finite_difference_columns(const std::function<Vector(const Vector&)>& eval_at,
                                 const Vector& x0, const Vector& r0, const std::vector<int>& columns,
                                 const FiniteDifferenceOptions& fd) {
  Matrix J(r0.size(), static_cast<int>(columns.size()));
  parallel_for(static_cast<int>(columns.size()), [&](int k) {
    const int j = columns[k];
    try {
      Vector xp = x0;
      xp(j) += fd.step;
      const Vector rp = eval_at(xp);
      if (fd.central) {
        Vector xm = x0;
        xm(j) -= fd.step;
        J.col(k) = (rp - eval_at(xm)) / (2.0 * fd.step);
      } else {
        J.col(k) = (rp - r0) / fd.step;
      }
    } catch (const GaitError& e) {
      throw GaitError(e.code(), "Jacobian column " + std::to_string(j) + ": " + e.what(), e.payload());
    }
  });
  return J;
}

JacobianResult IndirectShooting::jacobian(const IndirectDecision& chi, const Vector& sigma,
                                          std::vector<int> sigma_columns) const {
  const OcpDimensions d = ocp_->dimensions();
  const int N = IndirectLayout(d).size();
  if (sigma_columns.empty()) {
    sigma_columns.resize(d.n_sigma);
    std::iota(sigma_columns.begin(), sigma_columns.end(), 0);
  }
  const IndirectEvaluation nominal = evaluate(chi, sigma);
  const StepGrid grid = nominal.trajectory.grid();

  // Joint vector (chi, sigma) so one perturbation routine covers both.
  Vector joint(N + d.n_sigma);
  joint << chi.flatten(), sigma;
  std::vector<int> columns(N);
  std::iota(columns.begin(), columns.end(), 0);
  for (int s : sigma_columns) {
    require(s >= 0 && s < d.n_sigma, "parameter column out of range");
    columns.push_back(N + s);
  }
  auto eval_at = [&](const Vector& v) {
    const IndirectDecision c = IndirectDecision::unflatten(v.head(N), d);
    return evaluate(c, v.tail(d.n_sigma), &grid).residual;
  };

  JacobianResult out;
  out.residual = nominal.residual;
  out.R_sigma = finite_difference_columns(eval_at, joint, nominal.residual, columns, options_.fd);
  out.R = out.R_sigma.leftCols(N);
  return out;
}

Vector indirect_residual(const ParameterizedOcp& ocp, const IndirectDecision& chi,
                         const Vector& sigma, const ShootingOptions& options) {
  return IndirectShooting(ocp, options).residual(chi, sigma);
}

JacobianResult indirect_jacobian(const ParameterizedOcp& ocp, const IndirectDecision& chi,
                                 const Vector& sigma, const ShootingOptions& options) {
  return IndirectShooting(ocp, options).jacobian(chi, sigma);
}

}  // namespace gaitforge
