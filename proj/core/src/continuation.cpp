#include "gaitforge/continuation.hpp"

#include <cmath>

#include "gaitforge/error.hpp"

namespace gaitforge {

void ContinuationConfig::validate() const {
  require(h_min > 0.0 && h0 >= h_min && h_max >= h0, "step sizes must satisfy 0 < h_min <= h0 <= h_max");
  require(newton_tol > 0.0, "Newton tolerance must be positive");
  require(max_newton_iterations >= 1 && max_steps >= 0, "iteration limits must be positive");
  require(grow_factor >= 1.0, "growth factor must be at least 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kReachedEnd: return "reached-end";
    case Termination::kMaxSteps: return "max-steps";
    case Termination::kStalled: return "stalled";
    case Termination::kSingularPoint: return "singular-point";
    case Termination::kBranchSwitch: return "branch-switch";
  }
  return "unknown";
}

double orientation_determinant(const Matrix& R, const Vector& tau) {
  Matrix B(R.rows() + 1, R.cols());
  B << R, tau.transpose();
  return B.partialPivLu().determinant();
}

Vector tangent(const Matrix& R) {
  require(R.cols() == R.rows() + 1, "tangent needs an N x (N+1) Jacobian");
  Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || !(s(s.size() - 1) > 1e-13 * s(0))) {
    fail(ErrorCode::kSingularPoint, "Jacobian is rank deficient, tangent is not unique");
  }
  Vector tau = svd.matrixV().col(R.cols() - 1);
  tau.normalize();
  if (orientation_determinant(R, tau) < 0.0) tau = -tau;
  return tau;
}

Vector predict(const Vector& nu, const Vector& tau, double h, double direction) {
  return nu + h * direction * tau;
}

double initial_direction(double sigma_start, double sigma_end, const Vector& tau) {
  const double ts = tau(tau.size() - 1);
  if (sigma_end == sigma_start || ts == 0.0) {
    fail(ErrorCode::kDirectionUndefined, "tangent has no parameter component or target equals start");
  }
  return ((sigma_end > sigma_start) ? 1.0 : -1.0) * (ts > 0.0 ? 1.0 : -1.0);
}

namespace {

CorrectorOutcome correct_from(const CurveFunctions& fns, Vector nu, Linearization lin,
                              const Vector& tau_pred, const ContinuationConfig& config) {
  CorrectorOutcome out;
  const int N = static_cast<int>(lin.residual.size());
  double first = -1.0;
  for (int it = 0;; ++it) {
    const double rn = lin.residual.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(rn)) {
      out.reason = "non-finite residual";
      return out;
    }
    if (first < 0.0) first = rn;
    if (rn <= config.newton_tol) {
      out.converged = true;
      out.point.nu = nu;
      out.point.residual_norm = rn;
      out.point.newton_iterations = it;
      out.jacobian = std::move(lin.jacobian);
      return out;
    }
    if (it >= config.max_newton_iterations) {
      out.reason = "corrector iteration limit";
      return out;
    }
    if (it > 0 && rn > 1e3 * std::max(first, config.newton_tol)) {
      out.reason = "corrector diverged";
      return out;
    }
    Matrix B(N + 1, N + 1);
    B << lin.jacobian, tau_pred.transpose();
    Vector rhs(N + 1);
    rhs << lin.residual, 0.0;
    Eigen::FullPivLU<Matrix> lu(B);
    if (!lu.isInvertible()) {
      fail(ErrorCode::kSingularPoint, "bordered corrector matrix is singular");
    }
    nu -= lu.solve(rhs);
    try {
      lin = fns.linearize(nu);
    } catch (const GaitError& e) {
      if (e.code() == ErrorCode::kContractViolation) throw;
      out.reason = e.what();
      return out;
    }
  }
}

}  // namespace

CorrectorOutcome correct(const CurveFunctions& fns, const Vector& nu_pred, const Vector& tau_pred,
                         const ContinuationConfig& config) {
  return correct_from(fns, nu_pred, fns.linearize(nu_pred), tau_pred, config);
}

NewtonResult locate_on_curve(const CurveFunctions& fns, const Vector& guess, const Vector& c,
                             double target, const NewtonOptions& options) {
  auto residual = [&](const Vector& nu) {
    const Vector r = fns.residual(nu);
    Vector out(r.size() + 1);
    out << r, c.dot(nu) - target;
    return out;
  };
  auto linearize = [&](const Vector& nu) {
    Linearization lin = fns.linearize(nu);
    Linearization out;
    out.residual.resize(lin.residual.size() + 1);
    out.residual << lin.residual, c.dot(nu) - target;
    out.jacobian.resize(lin.jacobian.rows() + 1, lin.jacobian.cols());
    out.jacobian << lin.jacobian, c.transpose();
    return out;
  };
  return newton_solve(residual, linearize, guess, options);
}

GaitLibrary run_continuation(const CurveFunctions& fns, const Vector& nu_seed,
                             const ContinuationConfig& config,
                             const std::function<void(const ProgressRecord&)>& progress) {
  config.validate();
  const int last = static_cast<int>(nu_seed.size()) - 1;
  const Vector e_sigma = Vector::Unit(nu_seed.size(), last);
  NewtonOptions pin;
  pin.tolerance = config.newton_tol;
  pin.max_iterations = 2 * config.max_newton_iterations;

  GaitLibrary lib;
  Vector nu = nu_seed;
  Linearization lin = fns.linearize(nu);
  if (lin.residual.lpNorm<Eigen::Infinity>() > config.newton_tol) {
    const NewtonResult fixed = locate_on_curve(fns, nu, e_sigma, nu(last), pin);
    if (!fixed.converged) {
      fail(ErrorCode::kSeedInconsistency, "seed does not satisfy the residual tolerance", fixed.residual);
    }
    nu = fixed.x;
    lin = fns.linearize(nu);
  }

  CurvePoint seed;
  seed.nu = nu;
  seed.residual_norm = lin.residual.lpNorm<Eigen::Infinity>();
  seed.tangent = tangent(lin.jacobian);
  lib.points.push_back(seed);
  if (nu(last) == config.sigma_end) {
    lib.termination = Termination::kReachedEnd;
    lib.message = "seed already at the target parameter";
    return lib;
  }
  const double d = initial_direction(nu(last), config.sigma_end, seed.tangent);
  lib.direction = d;

  double h = config.h0;
  int streak = 0;
  for (int step = 1; step <= config.max_steps; ++step) {
    const CurvePoint& cur = lib.points.back();
    ProgressRecord rec;
    rec.step = step;
    rec.h = h;

    CorrectorOutcome outcome;
    Vector tau_new;
    std::string failure;
    try {
      const Vector nu_pred = predict(cur.nu, cur.tangent, h, d);
      Linearization at_pred = fns.linearize(nu_pred);
      const Vector tau_pred = tangent(at_pred.jacobian);
      outcome = correct_from(fns, nu_pred, std::move(at_pred), tau_pred, config);
      if (outcome.converged) {
        if ((outcome.point.nu - nu_pred).norm() > 2.0 * h) {
          failure = "corrector displacement exceeds 2h";
        } else {
          tau_new = tangent(outcome.jacobian);
          if (tau_new.dot(cur.tangent) <= 0.0) failure = "tangent reversed";
        }
      } else {
        failure = outcome.reason;
      }
    } catch (const GaitError& e) {
      if (e.code() == ErrorCode::kSingularPoint) {
        lib.termination = Termination::kSingularPoint;
        lib.message = e.what();
        return lib;
      }
      if (e.code() == ErrorCode::kContractViolation) throw;
      failure = e.what();
    }

    if (!failure.empty()) {
      ++lib.rejected_steps;
      rec.sigma = cur.nu(last);
      rec.accepted = false;
      if (progress) progress(rec);
      streak = 0;
      if (h <= config.h_min) {
        lib.termination = failure == "tangent reversed" ? Termination::kBranchSwitch : Termination::kStalled;
        lib.message = "step size at minimum: " + failure;
        return lib;
      }
      h = std::max(0.5 * h, config.h_min);
      continue;
    }

    CurvePoint next = outcome.point;
    next.tangent = tau_new;
    next.step = h;
    const double s_old = cur.nu(last);
    const double s_new = next.nu(last);
    if ((tau_new(last) > 0.0) != (cur.tangent(last) > 0.0)) {
      next.turning_point_before = true;
      lib.turning_points.push_back(static_cast<int>(lib.points.size()));
    }
    rec.sigma = s_new;
    rec.residual_norm = next.residual_norm;
    rec.newton_iterations = next.newton_iterations;
    rec.accepted = true;
    if (progress) progress(rec);

    if ((s_old - config.sigma_end) * (s_new - config.sigma_end) <= 0.0) {
      if (s_new != config.sigma_end) {
        const double w = (config.sigma_end - s_old) / (s_new - s_old);
        const Vector guess = cur.nu + w * (next.nu - cur.nu);
        const NewtonResult end = locate_on_curve(fns, guess, e_sigma, config.sigma_end, pin);
        if (!end.converged) {
          lib.termination = Termination::kStalled;
          lib.message = "could not pin the end point";
          lib.points.push_back(next);
          return lib;
        }
        const Linearization at_end = fns.linearize(end.x);
        next.nu = end.x;
        next.nu(last) = config.sigma_end;
        next.residual_norm = at_end.residual.lpNorm<Eigen::Infinity>();
        next.newton_iterations = end.iterations;
        next.tangent = tangent(at_end.jacobian);
        next.step = (end.x - cur.nu).norm();
      }
      lib.points.push_back(next);
      lib.termination = Termination::kReachedEnd;
      lib.message = "reached target parameter";
      return lib;
    }

    lib.points.push_back(next);
    if (next.newton_iterations <= config.fast_iterations) {
      if (++streak >= config.fast_streak) {
        h = std::min(h * config.grow_factor, config.h_max);
        streak = 0;
      }
    } else {
      streak = 0;
    }
  }
  lib.termination = Termination::kMaxSteps;
  lib.message = "step budget exhausted";
  return lib;
}

}  // namespace gaitforge
