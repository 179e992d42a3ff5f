#include "gaitforge/newton.hpp"

#include "gaitforge/error.hpp"

namespace gaitforge {

NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Linearization(const Vector&)>& linearize,
                          const Vector& x0, const NewtonOptions& options) {
  NewtonResult out;
  out.x = x0;
  Linearization lin = linearize(out.x);
  out.residual = lin.residual;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (out.residual.lpNorm<Eigen::Infinity>() <= options.tolerance) {
      out.converged = true;
      return out;
    }
    Eigen::FullPivLU<Matrix> lu(lin.jacobian);
    if (!lu.isInvertible()) {
      fail(ErrorCode::kNonConvergence, "singular Jacobian in Newton iteration", out.residual);
    }
    const Vector dx = lu.solve(out.residual);
    const double base = out.residual.norm();
    double alpha = 1.0;
    Vector trial = out.x - dx;
    for (int k = 0; k < options.max_halvings; ++k) {
      Vector r;
      bool ok = true;
      try {
        r = residual(trial);
      } catch (const GaitError&) {
        ok = false;
      }
      if (ok && r.allFinite() && r.norm() < base) break;
      alpha *= 0.5;
      trial = out.x - alpha * dx;
    }
    out.x = trial;
    lin = linearize(out.x);
    out.residual = lin.residual;
  }
  out.converged = out.residual.lpNorm<Eigen::Infinity>() <= options.tolerance;
  return out;
}

}  // namespace gaitforge
