#include "gaitforge/direct.hpp"

#include <algorithm>
#include <numeric>

#include "gaitforge/error.hpp"

namespace gaitforge {

Vector DirectDecision::flatten() const {
  Vector v(1 + x0.size() + xi.size() + lambda_hat.size());
  v << T, x0, xi, lambda_hat;
  return v;
}

DirectDecision DirectDecision::unflatten(const Vector& v, const OcpDimensions& d, int n_xi) {
  const DirectLayout L(d, n_xi);
  require(v.size() == L.size(), "direct decision has wrong length");
  DirectDecision out;
  out.T = v(L.T());
  out.x0 = v.segment(L.x0(), d.n_x);
  out.xi = v.segment(L.xi(), n_xi);
  out.lambda_hat = v.segment(L.lambda(), L.constraints());
  return out;
}

std::string to_string(StationaryKind k) {
  switch (k) {
    case StationaryKind::kStrictMinimum: return "strict-minimum";
    case StationaryKind::kMinimum: return "minimum";
    case StationaryKind::kSaddle: return "saddle";
  }
  return "unknown";
}

DirectShooting::DirectShooting(const ParameterizedOcp& ocp, InputBasis basis, ShootingOptions options)
    : ocp_(&ocp), basis_(std::move(basis)), options_(options) {
  require(ocp.dimensions().n_u == 1, "direct transcription supports a single input channel");
  options_.tolerances.validate();
}

DirectEvaluation DirectShooting::evaluate(const DirectDecision& chi, const Vector& sigma,
                                          const StepGrid* grid) const {
  const OcpDimensions d = ocp_->dimensions();
  const DirectLayout L = layout();
  const int n = d.n_x;
  const int nz = n + 1;
  const int nxi = basis_.size();
  require(chi.x0.size() == n && chi.xi.size() == nxi && chi.lambda_hat.size() == L.constraints(),
          "direct decision has inconsistent block sizes");
  require(sigma.size() == d.n_sigma, "parameter vector has wrong length");
  if (!(chi.T > 0.0)) fail(ErrorCode::kDomain, "horizon T must be positive");

  // theta = (T as it enters the input, xi)
  const double T = chi.T;
  SensitivitySystem sys;
  sys.n_z = nz;
  sys.n_theta = 1 + nxi;
  sys.rhs = [&](double t, const Vector& z, Vector& dz) {
    const Vector x = z.head(n);
    const Vector u = Vector::Constant(1, basis_.value(t, T, chi.xi));
    dz.resize(nz);
    dz.head(n) = ocp_->f(x, u, sigma);
    dz(n) = ocp_->l(x, u, sigma);
  };
  sys.jacobians = [&](double t, const Vector& z, Matrix& Fz, Matrix& Ft) {
    const Vector x = z.head(n);
    const Vector u = Vector::Constant(1, basis_.value(t, T, chi.xi));
    const DynamicsPartials fp = ocp_->f_partials(x, u, sigma);
    const StagePartials lp = ocp_->l_partials(x, u, sigma);
    Fz.setZero(nz, nz);
    Fz.topLeftCorner(n, n) = fp.fx;
    Fz.block(n, 0, 1, n) = lp.lx.transpose();
    Vector dFdu(nz);
    dFdu << fp.fu.col(0), lp.lu(0);
    Eigen::RowVectorXd du(1 + nxi);
    du(0) = basis_.dvalue_dT(t, T, chi.xi);
    du.tail(nxi) = basis_.dvalue_dxi(t, T).transpose();
    Ft = dFdu * du;
  };
  Vector z0 = Vector::Zero(nz);
  z0.head(n) = chi.x0;
  SensitivityResult sens = integrate_with_sensitivities(sys, z0, T, options_.tolerances, grid);

  const Vector xT = sens.zT.head(n);
  const double yT = sens.zT(n);
  // dz(T)/ds for s = (T, x0, xi)
  Matrix dz(nz, L.primal());
  dz.col(0) = sens.S_T + sens.S_theta.col(0);
  dz.middleCols(1, n) = sens.S_z0.leftCols(n);
  dz.rightCols(nxi) = sens.S_theta.rightCols(nxi);
  const Matrix dxT = dz.topRows(n);
  const Eigen::RowVectorXd dyT = dz.row(n);

  const CostPartials cp = ocp_->c_partials(T, xT, yT, sigma);
  const BoundaryPartials hp = ocp_->h_partials(T, xT, chi.x0, sigma);
  const Matrix gx = ocp_->g_partial(xT, sigma);

  DirectEvaluation out;
  out.cost = ocp_->c(T, xT, yT, sigma);
  out.grad_cost = (cp.dxT.transpose() * dxT + cp.dyT * dyT).transpose();
  out.grad_cost(0) += cp.dT;

  out.h_hat.resize(L.constraints());
  out.h_hat.head(n) = ocp_->g(xT, sigma) - chi.x0;
  out.h_hat.tail(d.n_h()) = ocp_->h(T, xT, chi.x0, sigma);

  Matrix E0 = Matrix::Zero(n, L.primal());  // dx0/ds
  E0.middleCols(1, n).setIdentity();
  out.grad_h.resize(L.constraints(), L.primal());
  out.grad_h.topRows(n) = gx * dxT - E0;
  out.grad_h.bottomRows(d.n_h()) = hp.dxT * dxT + hp.dx0 * E0;
  out.grad_h.bottomRows(d.n_h()).col(0) += hp.dT;

  out.residual.resize(L.size());
  out.residual.head(L.primal()) = out.grad_cost + out.grad_h.transpose() * chi.lambda_hat;
  out.residual.tail(L.constraints()) = out.h_hat;
  out.trajectory = std::move(sens.trajectory);
  return out;
}

Vector DirectShooting::residual(const DirectDecision& chi, const Vector& sigma) const {
  return evaluate(chi, sigma).residual;
}

JacobianResult DirectShooting::jacobian(const DirectDecision& chi, const Vector& sigma,
                                        std::vector<int> sigma_columns) const {
  const OcpDimensions d = ocp_->dimensions();
  const int N = layout().size();
  const int nxi = basis_.size();
  if (sigma_columns.empty()) {
    sigma_columns.resize(d.n_sigma);
    std::iota(sigma_columns.begin(), sigma_columns.end(), 0);
  }
  const DirectEvaluation nominal = evaluate(chi, sigma);
  const StepGrid grid = nominal.trajectory.grid();
  Vector joint(N + d.n_sigma);
  joint << chi.flatten(), sigma;
  std::vector<int> columns(N);
  std::iota(columns.begin(), columns.end(), 0);
  for (int s : sigma_columns) {
    require(s >= 0 && s < d.n_sigma, "parameter column out of range");
    columns.push_back(N + s);
  }
  auto eval_at = [&](const Vector& v) {
    return evaluate(DirectDecision::unflatten(v.head(N), d, nxi), v.tail(d.n_sigma), &grid).residual;
  };
  JacobianResult out;
  out.residual = nominal.residual;
  out.R_sigma = finite_difference_columns(eval_at, joint, nominal.residual, columns, options_.fd);
  out.R = out.R_sigma.leftCols(N);
  return out;
}

Vector DirectShooting::project_input(const std::function<double(double)>& u, double T,
                                     int samples) const {
  require(samples > basis_.size(), "projection needs more samples than coefficients");
  Matrix W(samples, basis_.size());
  Vector y(samples);
  for (int k = 0; k < samples; ++k) {
    const double t = T * k / (samples - 1);
    W.row(k) = basis_.weights(basis_.argument(t, T)).transpose();
    y(k) = u(t);
  }
  return W.colPivHouseholderQr().solve(y);
}

Vector DirectShooting::least_squares_multipliers(const DirectDecision& chi, const Vector& sigma) const {
  const DirectEvaluation ev = evaluate(chi, sigma);
  return ev.grad_h.transpose().colPivHouseholderQr().solve(-ev.grad_cost);
}

Vector direct_residual(const ParameterizedOcp& ocp, const InputBasis& basis,
                       const DirectDecision& chi, const Vector& sigma,
                       const ShootingOptions& options) {
  return DirectShooting(ocp, basis, options).residual(chi, sigma);
}

JacobianResult direct_jacobian(const ParameterizedOcp& ocp, const InputBasis& basis,
                               const DirectDecision& chi, const Vector& sigma,
                               const ShootingOptions& options) {
  return DirectShooting(ocp, basis, options).jacobian(chi, sigma);
}

Classification classify_stationary_point(const Matrix& grad_h, const Matrix& hessian, double zero_tol) {
  const int ns = static_cast<int>(hessian.rows());
  require(hessian.cols() == ns && grad_h.cols() == ns, "classification blocks have inconsistent shapes");
  Eigen::JacobiSVD<Matrix> svd(grad_h, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const int rank_needed = static_cast<int>(std::min<Eigen::Index>(grad_h.rows(), ns));
  if (s.size() < rank_needed || !(s(rank_needed - 1) > 1e-10 * s(0))) {
    fail(ErrorCode::kRegularityViolation, "constraint gradients are linearly dependent");
  }
  const Matrix D = svd.matrixV().rightCols(ns - rank_needed);
  const Matrix Hs = 0.5 * (hessian + hessian.transpose());
  const Matrix P = D.transpose() * Hs * D;
  Classification out;
  if (P.size() == 0) {
    out.kind = StationaryKind::kStrictMinimum;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (P + P.transpose()));
  out.eigenvalues = eig.eigenvalues();
  out.min_eigenvalue = out.eigenvalues(0);
  const double scale = out.eigenvalues.cwiseAbs().maxCoeff();
  if (out.min_eigenvalue > zero_tol * scale) {
    out.kind = StationaryKind::kStrictMinimum;
  } else if (out.min_eigenvalue >= -zero_tol * scale) {
    out.kind = StationaryKind::kMinimum;
  } else {
    out.kind = StationaryKind::kSaddle;
  }
  return out;
}

Classification classify_from_jacobian(const Matrix& R, const DirectLayout& layout, double zero_tol) {
  const int ns = layout.primal();
  return classify_stationary_point(R.block(ns, 0, layout.constraints(), ns), R.topLeftCorner(ns, ns),
                                   zero_tol);
}

}  // namespace gaitforge
