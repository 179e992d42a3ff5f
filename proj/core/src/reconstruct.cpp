#include "gaitforge/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaitforge/error.hpp"
#include "gaitforge/newton.hpp"

namespace gaitforge {

namespace {

DenseTrajectory unforced_flow(const ParameterizedOcp& ocp, const Vector& x0, double T,
                              const Vector& sigma, const ToleranceConfig& tol, const StepGrid* grid,
                              bool with_cost) {
  const OcpDimensions d = ocp.dimensions();
  const Vector u = Vector::Zero(d.n_u);
  OdeRhs rhs = [&](double, const Vector& z, Vector& dz) {
    const Vector x = z.head(d.n_x);
    dz.resize(z.size());
    dz.head(d.n_x) = ocp.f(x, u, sigma);
    if (with_cost) dz(d.n_x) = ocp.l(x, u, sigma);
  };
  Vector z0 = Vector::Zero(d.n_x + (with_cost ? 1 : 0));
  z0.head(d.n_x) = x0;
  return grid ? integrate_on_grid(rhs, z0, T, *grid) : integrate_fixed_horizon(rhs, z0, T, tol);
}

Vector residual_from_terminal(const ParameterizedOcp& ocp, double T, const Vector& x0,
                              const Vector& xT, const Vector& sigma) {
  const OcpDimensions d = ocp.dimensions();
  Vector r(d.n_x + d.n_h());
  r.head(d.n_x) = ocp.g(xT, sigma) - x0;
  r.tail(d.n_h()) = ocp.h(T, xT, x0, sigma);
  return r;
}

}  // namespace

Vector passive_residual(const ParameterizedOcp& ocp, double T, const Vector& x0, const Vector& sigma,
                        const ToleranceConfig& tol, const StepGrid* grid) {
  if (!(T > 0.0)) fail(ErrorCode::kDomain, "passive horizon must be positive");
  const DenseTrajectory traj = unforced_flow(ocp, x0, T, sigma, tol, grid, false);
  return residual_from_terminal(ocp, T, x0, traj.terminal_state(), sigma);
}

PassiveGait find_passive_gait(const ParameterizedOcp& ocp, const PassiveGaitRequest& request,
                              const PassiveSearchOptions& options) {
  const OcpDimensions d = ocp.dimensions();
  require(request.x0_guess.size() == d.n_x, "passive guess has wrong state length");
  require(request.sigma.size() == d.n_sigma, "passive request has wrong parameter length");
  require(request.free_index >= 0 && request.free_index < d.n_sigma, "free parameter out of range");
  require(d.n_omega == 1, "passive search needs exactly one operating condition");

  const int n = d.n_x;
  auto unpack = [&](const Vector& v, double& T, Vector& x0, Vector& sigma) {
    T = v(0);
    x0 = v.segment(1, n);
    sigma = request.sigma;
    sigma(request.free_index) = v(n + 1);
  };
  auto residual = [&](const Vector& v) {
    double T;
    Vector x0, sigma;
    unpack(v, T, x0, sigma);
    return passive_residual(ocp, T, x0, sigma, options.tolerances);
  };
  auto linearize = [&](const Vector& v) {
    double T;
    Vector x0, sigma;
    unpack(v, T, x0, sigma);
    if (!(T > 0.0)) fail(ErrorCode::kNonConvergence, "passive search reached T <= 0");
    const DenseTrajectory traj = unforced_flow(ocp, x0, T, sigma, options.tolerances, nullptr, false);
    const StepGrid grid = traj.grid();
    Linearization lin;
    lin.residual = residual_from_terminal(ocp, T, x0, traj.terminal_state(), sigma);
    lin.jacobian.resize(lin.residual.size(), v.size());
    for (int j = 0; j < v.size(); ++j) {
      Vector vp = v;
      vp(j) += options.fd_step;
      double Tp;
      Vector xp, sp;
      unpack(vp, Tp, xp, sp);
      lin.jacobian.col(j) = (passive_residual(ocp, Tp, xp, sp, options.tolerances, &grid) - lin.residual) /
                            options.fd_step;
    }
    return lin;
  };

  Vector v(n + 2);
  v << request.T_guess, request.x0_guess, request.sigma(request.free_index);
  NewtonOptions nopts;
  nopts.tolerance = options.residual_tol;
  nopts.max_iterations = options.max_iterations;
  nopts.max_halvings = options.max_halvings;
  NewtonResult res;
  try {
    res = newton_solve(residual, linearize, v, nopts);
  } catch (const GaitError& e) {
    fail(ErrorCode::kSeedFailure, std::string("passive search failed: ") + e.what());
  }
  if (!res.converged) {
    fail(ErrorCode::kNonConvergence, "passive search did not converge", res.residual);
  }
  PassiveGait out;
  unpack(res.x, out.T, out.x0, out.sigma);
  if (out.T < options.T_min) {
    fail(ErrorCode::kSeedFailure, "passive search converged to a trivial period T = " + std::to_string(out.T));
  }
  out.free_index = request.free_index;
  out.branch_tag = request.branch_tag;
  out.residual_norm = res.residual.lpNorm<Eigen::Infinity>();
  out.iterations = res.iterations;
  return out;
}

PassiveGait sweep_passive_gait(const ParameterizedOcp& ocp, const PassiveGait& start,
                               int sweep_index, double target, int increments,
                               const PassiveSearchOptions& options) {
  require(increments >= 1, "sweep needs at least one increment");
  require(sweep_index != start.free_index, "cannot sweep the free parameter");
  const double from = start.sigma(sweep_index);
  PassiveGait prev = start, cur = start;
  bool have_prev = false;
  for (int k = 1; k <= increments; ++k) {
    const double value = from + (target - from) * k / increments;
    PassiveGaitRequest req;
    req.sigma = cur.sigma;
    req.sigma(sweep_index) = value;
    req.free_index = cur.free_index;
    req.branch_tag = cur.branch_tag;
    req.T_guess = cur.T;
    req.x0_guess = cur.x0;
    if (have_prev) {
      req.T_guess = 2.0 * cur.T - prev.T;
      req.x0_guess = 2.0 * cur.x0 - prev.x0;
      req.sigma(cur.free_index) = 2.0 * cur.sigma(cur.free_index) - prev.sigma(cur.free_index);
    }
    PassiveGait next = find_passive_gait(ocp, req, options);
    prev = cur;
    cur = next;
    have_prev = true;
  }
  return cur;
}

double reconstruct_q(const ParameterizedOcp& ocp, const PassiveGait& passive,
                     const ToleranceConfig& tol) {
  const int n = ocp.dimensions().n_x;
  const DenseTrajectory traj = unforced_flow(ocp, passive.x0, passive.T, passive.sigma, tol, nullptr, true);
  const Vector& zT = traj.terminal_state();
  return ocp.c_partials(passive.T, zT.head(n), zT(n), passive.sigma).dyT;
}

Matrix chebyshev_center_derivatives(const Matrix& samples, int max_order, double delta) {
  const int n = static_cast<int>(samples.rows()) - 1;
  const int m = static_cast<int>(samples.cols());
  require(n >= 2, "need at least three Chebyshev nodes");
  // Coefficients of f = sum a_k T_k on the Lobatto grid.
  Matrix a = Matrix::Zero(n + 1, m);
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      a.row(k) += w * std::cos(std::numbers::pi * k * j / n) * samples.row(j);
    }
    a.row(k) *= 2.0 / n;
  }
  a.row(0) *= 0.5;
  a.row(n) *= 0.5;

  auto at_zero = [&](const Matrix& c) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(m);
    for (int k = 0; k < c.rows(); k += 2) v += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * c.row(k);
    return v;
  };

  Matrix out(max_order + 1, m);
  out.row(0) = at_zero(a);
  Matrix c = a;
  double scale = 1.0;
  for (int order = 1; order <= max_order; ++order) {
    const int deg = static_cast<int>(c.rows()) - 1;
    Matrix b = Matrix::Zero(std::max(deg, 1), m);
    if (deg >= 1) {
      // b_{k-1} = b_{k+1} + 2 k a_k, then b_0 halved.
      Matrix full = Matrix::Zero(deg + 2, m);
      for (int k = deg; k >= 1; --k) full.row(k - 1) = full.row(k + 1) + 2.0 * k * c.row(k);
      full.row(0) *= 0.5;
      b = full.topRows(deg);
    }
    c = b;
    scale /= delta;
    out.row(order) = scale * at_zero(c);
  }
  return out;
}

std::pair<std::vector<int>, double> select_rows(const Matrix& rows, int count) {
  const int R = static_cast<int>(rows.rows());
  Matrix work = rows;
  for (int i = 0; i < R; ++i) {
    const double nrm = work.row(i).norm();
    if (nrm > 0.0) work.row(i) /= nrm;
  }
  std::vector<int> chosen;
  std::vector<bool> used(R, false);
  double volume = 1.0;
  for (int k = 0; k < count; ++k) {
    int best = -1;
    double best_norm = 0.0;
    for (int i = 0; i < R; ++i) {
      if (used[i]) continue;
      const double nrm = work.row(i).norm();
      if (nrm > best_norm * (1.0 + 1e-12)) {
        best = i;
        best_norm = nrm;
      }
    }
    if (best < 0) return {chosen, 0.0};
    used[best] = true;
    chosen.push_back(best);
    volume *= best_norm;
    const Eigen::RowVectorXd dir = work.row(best) / best_norm;
    for (int i = 0; i < R; ++i) {
      if (!used[i]) work.row(i) -= work.row(i).dot(dir) * dir;
    }
  }
  return {chosen, volume};
}

ObservabilityStack build_observability_stack(const ParameterizedOcp& ocp, const Vector& x, double q,
                                             const Vector& sigma, int depth,
                                             const ObservabilityOptions& options) {
  const OcpDimensions d = ocp.dimensions();
  const int n = d.n_x;
  const int nu = d.n_u;
  require(depth >= 1, "observability depth must be positive");
  require(x.size() == n, "observability state has wrong length");
  const Vector u0 = Vector::Zero(nu);

  // w = (x, Psi, psi): costate transition and its forced part along the unforced flow.
  const int dim = n + n * n + n;
  auto forward = [&](const Vector& w, Vector& dw) {
    const Vector xs = w.head(n);
    const DynamicsPartials fp = ocp.f_partials(xs, u0, sigma);
    const StagePartials lp = ocp.l_partials(xs, u0, sigma);
    dw.resize(dim);
    dw.head(n) = ocp.f(xs, u0, sigma);
    Eigen::Map<const Matrix> Psi(w.data() + n, n, n);
    Eigen::Map<Matrix>(dw.data() + n, n, n) = -fp.fx.transpose() * Psi;
    dw.tail(n) = -fp.fx.transpose() * w.tail(n) - lp.lx;
  };
  Vector w0 = Vector::Zero(dim);
  w0.head(n) = x;
  Eigen::Map<Matrix>(w0.data() + n, n, n).setIdentity();

  const double delta = options.window;
  const DenseTrajectory fwd = integrate_fixed_horizon(
      [&](double, const Vector& w, Vector& dw) { forward(w, dw); }, w0, delta, options.tolerances);
  const DenseTrajectory bwd = integrate_fixed_horizon(
      [&](double, const Vector& w, Vector& dw) {
        forward(w, dw);
        dw = -dw;
      },
      w0, delta, options.tolerances);

  const int N = options.nodes;
  const int cols = nu * n + nu;
  Matrix samples(N + 1, cols);
  for (int j = 0; j <= N; ++j) {
    const double t = delta * std::cos(std::numbers::pi * j / N);
    const Vector w = t >= 0.0 ? fwd(t) : bwd(-t);
    const Vector xs = w.head(n);
    const Matrix fu = ocp.f_partials(xs, u0, sigma).fu;
    Eigen::Map<const Matrix> Psi(w.data() + n, n, n);
    const Matrix YA = fu.transpose() * Psi;  // nu x n
    const Vector Yb = fu.transpose() * w.tail(n) + ocp.l_partials(xs, u0, sigma).lu;
    for (int r = 0; r < nu; ++r) {
      samples.block(j, r * n, 1, n) = YA.row(r);
      samples(j, nu * n + r) = Yb(r);
    }
  }
  const Matrix der = chebyshev_center_derivatives(samples, depth - 1, delta);

  ObservabilityStack out;
  out.depth = depth;
  out.A_tilde.resize(depth * nu, n);
  out.b_tilde.resize(depth * nu);
  for (int k = 0; k < depth; ++k) {
    for (int r = 0; r < nu; ++r) {
      out.A_tilde.row(k * nu + r) = der.block(k, r * n, 1, n);
      out.b_tilde(k * nu + r) = -der(k, nu * n + r);
    }
  }
  auto [rows, volume] = select_rows(out.A_tilde, n);
  out.scaled_det = volume;
  if (static_cast<int>(rows.size()) < n || volume <= options.det_threshold) {
    fail(ErrorCode::kObservabilityFailure,
         "Lie-derivative stack of depth " + std::to_string(depth) + " has no invertible selection");
  }
  out.selected_rows = rows;
  out.A.resize(n, n);
  out.b.resize(n);
  for (int i = 0; i < n; ++i) {
    out.A.row(i) = out.A_tilde.row(rows[i]);
    out.b(i) = out.b_tilde(rows[i]);
  }
  (void)q;
  return out;
}

ObservabilityStack build_observability_stack(const ParameterizedOcp& ocp, const Vector& x, double q,
                                             const Vector& sigma, const ObservabilityOptions& options) {
  const OcpDimensions d = ocp.dimensions();
  const int start = (d.n_x + d.n_u - 1) / d.n_u;
  for (int depth = start; depth <= 2 * d.n_x; ++depth) {
    try {
      return build_observability_stack(ocp, x, q, sigma, depth, options);
    } catch (const GaitError& e) {
      if (e.code() != ErrorCode::kObservabilityFailure) throw;
    }
  }
  fail(ErrorCode::kObservabilityFailure,
       "no invertible Lie-derivative selection up to depth " + std::to_string(2 * d.n_x));
}

Vector reconstruct_costate(const ObservabilityStack& stack, double q) {
  Eigen::FullPivLU<Matrix> lu(stack.A);
  if (!lu.isInvertible()) fail(ErrorCode::kObservabilityFailure, "selected stack rows are singular");
  return lu.solve(stack.b) * q;
}

LambdaReconstruction reconstruct_lambda(const ParameterizedOcp& ocp, const PassiveGait& passive,
                                        const Vector& p0, const Vector& pT, double yT,
                                        const ToleranceConfig& tol) {
  const int n = ocp.dimensions().n_x;
  const DenseTrajectory traj = unforced_flow(ocp, passive.x0, passive.T, passive.sigma, tol, nullptr, false);
  const Vector xT = traj.terminal_state().head(n);
  const Matrix gx = ocp.g_partial(xT, passive.sigma);
  const BoundaryPartials hp = ocp.h_partials(passive.T, xT, passive.x0, passive.sigma);
  const CostPartials cp = ocp.c_partials(passive.T, xT, yT, passive.sigma);
  const Matrix H = gx.transpose() * hp.dx0.transpose() + hp.dxT.transpose();
  const Vector rhs = pT - gx.transpose() * p0 - cp.dxT;

  Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = 1e-10 * (s.size() ? s(0) : 0.0);
  LambdaReconstruction out;
  out.singular_values = s;
  Vector coeff = svd.matrixU().transpose() * rhs;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) {
      coeff(i) /= s(i);
      ++out.rank;
    } else {
      coeff(i) = 0.0;
    }
  }
  out.lambda = svd.matrixV() * coeff;
  return out;
}

IndirectSeed seed_from_passive(const ParameterizedOcp& ocp, const PassiveGait& passive,
                               const ShootingOptions& shooting, const SeedOptions& options) {
  const OcpDimensions d = ocp.dimensions();
  const int n = d.n_x;
  const double q = reconstruct_q(ocp, passive, shooting.tolerances);

  const ObservabilityStack s0 = build_observability_stack(ocp, passive.x0, q, passive.sigma,
                                                          options.observability);
  const Vector p0 = reconstruct_costate(s0, q);

  IndirectSeed seed;
  seed.passive = passive;
  seed.sigma = passive.sigma;
  seed.chi.T = passive.T;
  seed.chi.x0 = passive.x0;
  seed.chi.p0 = p0;
  seed.chi.q = q;
  seed.chi.u0 = eliminate_input(ocp, passive.x0, p0, q, passive.sigma);
  seed.chi.lambda = Vector::Zero(d.n_h());

  // Costate at T from the extended flow, compared against the stack at x(T).
  const IndirectShooting shoot(ocp, shooting);
  const IndirectEvaluation ev = shoot.evaluate(seed.chi, seed.sigma);
  const Vector& zT = ev.trajectory.terminal_state();
  const Vector xT = zT.head(n);
  const double yT = zT(n);
  const Vector pT_int = zT.tail(n);
  const ObservabilityStack sT = build_observability_stack(ocp, xT, q, passive.sigma, options.observability);
  const Vector pT_rec = reconstruct_costate(sT, q);

  const LambdaReconstruction lam = reconstruct_lambda(ocp, passive, p0, pT_rec, yT, shooting.tolerances);
  seed.chi.lambda = lam.lambda;

  SeedDiagnostics& diag = seed.diagnostics;
  diag.residual = shoot.residual(seed.chi, seed.sigma);
  diag.residual_norm = diag.residual.lpNorm<Eigen::Infinity>();
  diag.costate_mismatch = (pT_rec - pT_int).norm();
  diag.lambda_rank = lam.rank;
  diag.stack_depth = s0.depth;
  diag.selected_rows = s0.selected_rows;
  if (!(diag.residual_norm <= options.consistency_tol)) {
    fail(ErrorCode::kSeedInconsistency,
         "reconstructed seed has residual " + std::to_string(diag.residual_norm), diag.residual);
  }
  return seed;
}

}  // namespace gaitforge
