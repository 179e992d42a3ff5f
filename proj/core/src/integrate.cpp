#include "gaitforge/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "gaitforge/error.hpp"

namespace gaitforge {

namespace {

// Dormand-Prince 5(4) tableau with Shampine's dense output.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

bool finite(const Vector& v) { return v.allFinite(); }

}  // namespace

void ToleranceConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_steps <= 0) {
    fail(ErrorCode::kContractViolation, "tolerances must be positive");
  }
}

StepGrid DenseTrajectory::grid() const {
  StepGrid g;
  g.horizon = horizon_;
  g.steps.reserve(segments_.size());
  for (const Segment& s : segments_) g.steps.push_back(s.h);
  return g;
}

Vector DenseTrajectory::operator()(double t) const {
  if (segments_.empty() || t <= 0.0) return z0_;
  if (t >= horizon_) return zT_;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  const Segment& s = segments_[std::min(k, segments_.size() - 1)];
  if (t == s.t0) return s.r1;
  const double th = (t - s.t0) / s.h;
  const double th1 = 1.0 - th;
  return s.r1 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
}

class Dopri5 {
 public:
  Dopri5(const OdeRhs& rhs, const Vector& z0, double T) : rhs_(rhs), n_(z0.size()), T_(T) {
    out_.horizon_ = T;
    out_.z0_ = z0;
    out_.zT_ = z0;
    out_.breakpoints_.push_back(0.0);
    k1 = k2 = k3 = k4 = k5 = k6 = k7 = ytmp = ynew = Vector::Zero(n_);
  }

  DenseTrajectory adaptive(const ToleranceConfig& tol) {
    tol.validate();
    if (T_ == 0.0) return out_;
    Vector y = out_.z0_;
    double t = 0.0;
    eval(t, y, k1);
    double h = initial_step(y, tol);
    double facold = 1e-4;
    bool rejected_last = false;
    int steps = 0;
    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2, fac_max = 10.0;
    bool last = false;
    while (true) {
      if (++steps > tol.max_steps) {
        fail(ErrorCode::kNonConvergence, "integrator exceeded the step budget");
      }
      if (h < 1e-14 * std::max(1.0, T_)) {
        fail(ErrorCode::kNonConvergence, "integrator step size underflow");
      }
      if (t + 1.01 * h >= T_) {
        h = T_ - t;
        last = true;
      }
      stages(t, y, h);
      double err = 0.0;
      for (int i = 0; i < n_; ++i) {
        const double sk = tol.abs_tol + tol.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        const double ei = h * (e1 * k1(i) + e3 * k3(i) + e4 * k4(i) + e5 * k5(i) + e6 * k6(i) +
                               e7 * k7(i));
        err += (ei / sk) * (ei / sk);
      }
      err = std::sqrt(err / n_);
      if (!std::isfinite(err)) {
        fail(ErrorCode::kDivergence, "non-finite state during integration");
      }
      const double fac11 = std::pow(err, expo1);
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safe));
      double hnew = h / fac;
      if (err <= 1.0) {
        facold = std::max(err, 1e-4);
        const double tnew = last ? T_ : t + h;
        record(t, h, y, tnew);
        k1 = k7;
        y = ynew;
        t = tnew;
        if (last) break;
        if (rejected_last) hnew = std::min(hnew, h);
        rejected_last = false;
      } else {
        hnew = h / std::min(1.0 / fac_min, fac11 / safe);
        rejected_last = true;
        last = false;
        ++out_.rejected_;
      }
      h = hnew;
    }
    out_.zT_ = y;
    return std::move(out_);
  }

  DenseTrajectory replay(const StepGrid& grid) {
    if (T_ == 0.0) return out_;
    require(!grid.steps.empty() && grid.horizon > 0.0, "integrate_on_grid: empty grid");
    const double ratio = T_ / grid.horizon;
    Vector y = out_.z0_;
    double t = 0.0;
    eval(t, y, k1);
    const std::size_t K = grid.steps.size();
    for (std::size_t k = 0; k < K; ++k) {
      const bool last = k + 1 == K;
      const double h = last ? T_ - t : grid.steps[k] * ratio;
      stages(t, y, h);
      if (!finite(ynew)) fail(ErrorCode::kDivergence, "non-finite state during integration");
      const double tnew = last ? T_ : t + h;
      record(t, h, y, tnew);
      k1 = k7;
      y = ynew;
      t = tnew;
    }
    out_.zT_ = y;
    return std::move(out_);
  }

 private:
  void eval(double t, const Vector& y, Vector& dy) {
    rhs_(t, y, dy);
    if (!finite(dy)) fail(ErrorCode::kDivergence, "non-finite right-hand side");
  }

  void stages(double t, const Vector& y, double h) {
    ytmp = y + h * a21 * k1;
    eval(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    eval(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    eval(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    eval(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    eval(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    eval(t + h, ynew, k7);
  }

  void record(double t, double h, const Vector& y, double tnew) {
    DenseTrajectory::Segment s;
    s.t0 = t;
    s.h = h;
    s.r1 = y;
    s.r2 = ynew - y;
    s.r3 = h * k1 - s.r2;
    s.r4 = s.r2 - h * k7 - s.r3;
    s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    s.y1 = ynew;
    out_.segments_.push_back(std::move(s));
    out_.breakpoints_.push_back(tnew);
  }

  double initial_step(const Vector& y, const ToleranceConfig& tol) {
    double dnf = 0.0, dny = 0.0;
    Vector sk(n_);
    for (int i = 0; i < n_; ++i) {
      sk(i) = tol.abs_tol + tol.rel_tol * std::abs(y(i));
      dnf += (k1(i) / sk(i)) * (k1(i) / sk(i));
      dny += (y(i) / sk(i)) * (y(i) / sk(i));
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, T_);
    ytmp = y + h * k1;
    eval(h, ytmp, k2);
    double der2 = 0.0;
    for (int i = 0; i < n_; ++i) der2 += ((k2(i) - k1(i)) / sk(i)) * ((k2(i) - k1(i)) / sk(i));
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, T_});
  }

  const OdeRhs& rhs_;
  int n_;
  double T_;
  DenseTrajectory out_;
  Vector k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
};

DenseTrajectory integrate_fixed_horizon(const OdeRhs& rhs, const Vector& z0, double T,
                                        const ToleranceConfig& tol) {
  if (!(T >= 0.0)) fail(ErrorCode::kDomain, "negative integration horizon");
  return Dopri5(rhs, z0, T).adaptive(tol);
}

DenseTrajectory integrate_on_grid(const OdeRhs& rhs, const Vector& z0, double T,
                                  const StepGrid& grid) {
  if (!(T >= 0.0)) fail(ErrorCode::kDomain, "negative integration horizon");
  return Dopri5(rhs, z0, T).replay(grid);
}

SensitivityResult integrate_with_sensitivities(const SensitivitySystem& sys, const Vector& z0,
                                               double T, const ToleranceConfig& tol,
                                               const StepGrid* grid) {
  const int n = sys.n_z;
  const int m = sys.n_theta;
  require(z0.size() == n, "integrate_with_sensitivities: state dimension mismatch");
  const int total = n + n * n + n * m;

  OdeRhs aug = [&](double t, const Vector& w, Vector& dw) {
    const Vector z = w.head(n);
    Vector dz(n);
    sys.rhs(t, z, dz);
    Matrix Fz(n, n), Ft(n, m);
    sys.jacobians(t, z, Fz, Ft);
    dw.resize(total);
    dw.head(n) = dz;
    Eigen::Map<const Matrix> Sz(w.data() + n, n, n);
    Eigen::Map<Matrix>(dw.data() + n, n, n) = Fz * Sz;
    if (m > 0) {
      Eigen::Map<const Matrix> St(w.data() + n + n * n, n, m);
      Eigen::Map<Matrix>(dw.data() + n + n * n, n, m) = Fz * St + Ft;
    }
  };

  Vector w0 = Vector::Zero(total);
  w0.head(n) = z0;
  Eigen::Map<Matrix>(w0.data() + n, n, n).setIdentity();

  SensitivityResult out;
  out.trajectory = grid ? integrate_on_grid(aug, w0, T, *grid) : integrate_fixed_horizon(aug, w0, T, tol);
  const Vector& wT = out.trajectory.terminal_state();
  out.zT = wT.head(n);
  out.S_z0 = Eigen::Map<const Matrix>(wT.data() + n, n, n);
  out.S_theta = Eigen::Map<const Matrix>(wT.data() + n + n * n, n, m);
  out.S_T.resize(n);
  sys.rhs(T, out.zT, out.S_T);
  return out;
}

}  // namespace gaitforge
