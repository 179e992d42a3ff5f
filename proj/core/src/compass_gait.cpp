#include "gaitforge/compass_gait.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "gaitforge/error.hpp"

namespace gaitforge::compass_gait {

std::string to_string(MassMatrixConvention c) {
  return c == MassMatrixConvention::kStandard ? "standard" : "as-printed";
}

MassMatrixConvention convention_from_string(const std::string& s) {
  if (s == "standard") return MassMatrixConvention::kStandard;
  if (s == "as-printed") return MassMatrixConvention::kAsPrinted;
  fail(ErrorCode::kContractViolation, "unknown mass-matrix convention '" + s + "'");
}

double WalkerParams::k() const { return 1.0 / (m * std::sqrt(g * l * l * l)); }

void WalkerParams::validate() const {
  require(m > 0 && m_h > 0 && m_l > 0 && a > 0 && b > 0 && l > 0 && g > 0,
          "walker parameters must be positive");
}

namespace {

struct Terms {
  double s, co;          // sin/cos of alpha
  double K;              // m_l l b
  Eigen::Matrix2d M;
  Eigen::PartialPivLU<Eigen::Matrix2d> lu;
};

Terms terms(double alpha, const WalkerParams& p) {
  Terms t;
  t.s = std::sin(alpha);
  t.co = std::cos(alpha);
  t.K = p.m_l * p.l * p.b;
  t.M = mass_matrix(alpha, p);
  if (std::abs(t.M.determinant()) < 1e-12) {
    fail(ErrorCode::kSingularMassMatrix, "mass matrix is singular");
  }
  t.lu.compute(t.M);
  return t;
}

double hip_gravity(const WalkerParams& p) { return (p.m_h * p.l + p.m_l * p.a + p.m_l * p.l) * p.g; }

// Right side M qdd = B u - C qd - G.
Eigen::Vector2d generalized_force(const Vector& x, double u, const Terms& t, const WalkerParams& p) {
  const double dsw = x(2), dst = x(3);
  Eigen::Vector2d r;
  r(0) = -u - t.K * t.s * dst * dst - p.m_l * p.b * p.g * std::sin(x(0));
  r(1) = u + t.K * t.s * dsw * dsw + hip_gravity(p) * std::sin(x(1));
  return r;
}

struct ImpactTerms {
  Eigen::Matrix2d Qm, Qp, dQm, dQp;
  Eigen::PartialPivLU<Eigen::Matrix2d> lu;
};

ImpactTerms impact_terms(double alpha, const WalkerParams& p) {
  const double s = std::sin(alpha), co = std::cos(alpha);
  const double mab = p.m_l * p.a * p.b;
  const double Kq = p.m_h * p.l * p.l + 2.0 * p.m_l * p.a * p.l;
  const double Kp = p.m_l * p.b * p.l;
  ImpactTerms it;
  it.Qm << -mab, -mab + Kq * co, 0.0, -mab;
  it.Qp << p.m_l * p.b * p.b - Kp * co, p.m_l * p.l * p.l + p.m_l * p.a * p.a + p.m_h * p.l * p.l - Kp * co,
      p.m_l * p.b * p.b, -Kp * co;
  it.dQm << 0.0, -Kq * s, 0.0, 0.0;
  it.dQp << Kp * s, Kp * s, 0.0, Kp * s;
  if (std::abs(it.Qp.determinant()) < 1e-12) {
    fail(ErrorCode::kSingularImpact, "post-impact momentum matrix is singular");
  }
  it.lu.compute(it.Qp);
  return it;
}

void check_state(const Vector& x) { require(x.size() == 4, "compass gait state has 4 entries"); }
void check_sigma(const Vector& s) { require(s.size() == 2, "compass gait parameters are (gamma, v_avg)"); }

}  // namespace

Eigen::Matrix2d mass_matrix(double alpha, const WalkerParams& p) {
  const double off = -p.m_l * p.l * p.b * std::cos(alpha);
  Eigen::Matrix2d M;
  if (p.convention == MassMatrixConvention::kStandard) {
    M << p.m_l * p.b * p.b, off, off, (p.m_h + p.m_l) * p.l * p.l + p.m_l * p.a * p.a;
  } else {
    M << p.m_h * p.b * p.b, off, off, (p.m_h + p.m_l) * p.l * p.l + p.m * p.a * p.a;
  }
  return M;
}

Vector continuous_rhs(const Vector& x, double u, const WalkerParams& p) {
  check_state(x);
  const Terms t = terms(x(1) - x(0), p);
  const Eigen::Vector2d qdd = t.lu.solve(generalized_force(x, u, t, p));
  Vector dx(4);
  dx << x(2), x(3), qdd;
  return dx;
}

Vector impact_map(const Vector& x, const WalkerParams& p) {
  check_state(x);
  const ImpactTerms it = impact_terms(x(1) - x(0), p);
  Vector xp(4);
  xp << x(1), x(0), it.lu.solve(it.Qm * x.tail<2>());
  return xp;
}

CompassGait::CompassGait(WalkerParams params) : params_(params) { params_.validate(); }

Vector CompassGait::nominal_parameters() const {
  Vector s(2);
  s << 0.0, 0.1;
  return s;
}

std::pair<Vector, Vector> CompassGait::probe_box() const {
  Vector hi(4);
  hi << 0.6, 0.6, 1.0, 1.0;
  return {-hi, hi};
}

Vector CompassGait::f(const Vector& x, const Vector& u, const Vector&) const {
  return continuous_rhs(x, u(0), params_);
}

Vector CompassGait::g(const Vector& x, const Vector&) const { return impact_map(x, params_); }

double CompassGait::e(double, const Vector& xT, const Vector&, const Vector& sigma) const {
  check_sigma(sigma);
  return xT(0) + xT(1) + 2.0 * sigma(0);
}

Vector CompassGait::omega(double T, const Vector& xT, const Vector&, const Vector& sigma) const {
  check_sigma(sigma);
  return Vector::Constant(1, 2.0 * params_.l * std::sin(xT(0) + sigma(0)) - sigma(1) * T);
}

double CompassGait::l(const Vector&, const Vector& u, const Vector&) const {
  return 0.5 * params_.k() * u.squaredNorm();
}

double CompassGait::c(double T, const Vector&, double yT, const Vector& sigma) const {
  check_sigma(sigma);
  const double denom = params_.m * params_.g * sigma(1) * T;
  if (!(std::abs(denom) > 0.0)) fail(ErrorCode::kSingularCost, "cost of transport needs v_avg*T != 0");
  return yT / denom;
}

DynamicsPartials CompassGait::f_partials(const Vector& x, const Vector& u, const Vector&) const {
  check_state(x);
  const WalkerParams& p = params_;
  const Terms t = terms(x(1) - x(0), p);
  const Eigen::Vector2d qdd = t.lu.solve(generalized_force(x, u(0), t, p));
  const double dsw = x(2), dst = x(3);

  Eigen::Matrix2d dM;  // dM/dalpha
  dM << 0.0, t.K * t.s, t.K * t.s, 0.0;
  const Eigen::Vector2d dr_dalpha(-t.K * t.co * dst * dst, t.K * t.co * dsw * dsw);
  const Eigen::Vector2d dqdd_dalpha = t.lu.solve(dr_dalpha - dM * qdd);

  const Eigen::Vector2d dr_sw(-p.m_l * p.b * p.g * std::cos(x(0)), 0.0);
  const Eigen::Vector2d dr_st(0.0, hip_gravity(p) * std::cos(x(1)));
  const Eigen::Vector2d dr_dsw(0.0, 2.0 * t.K * t.s * dsw);
  const Eigen::Vector2d dr_dst(-2.0 * t.K * t.s * dst, 0.0);

  DynamicsPartials out;
  out.fx = Matrix::Zero(4, 4);
  out.fx(0, 2) = 1.0;
  out.fx(1, 3) = 1.0;
  out.fx.block<2, 1>(2, 0) = -dqdd_dalpha + t.lu.solve(dr_sw);
  out.fx.block<2, 1>(2, 1) = dqdd_dalpha + t.lu.solve(dr_st);
  out.fx.block<2, 1>(2, 2) = t.lu.solve(dr_dsw);
  out.fx.block<2, 1>(2, 3) = t.lu.solve(dr_dst);
  out.fu = Matrix::Zero(4, 1);
  out.fu.block<2, 1>(2, 0) = t.lu.solve(Eigen::Vector2d(-1.0, 1.0));
  return out;
}

StagePartials CompassGait::l_partials(const Vector&, const Vector& u, const Vector&) const {
  return {Vector::Zero(4), params_.k() * u};
}

Matrix CompassGait::g_partial(const Vector& x, const Vector&) const {
  check_state(x);
  const ImpactTerms it = impact_terms(x(1) - x(0), params_);
  const Eigen::Vector2d qd = x.tail<2>();
  const Eigen::Vector2d Pqd = it.lu.solve(it.Qm * qd);
  const Eigen::Vector2d dP = it.lu.solve(it.dQm * qd - it.dQp * Pqd);
  Matrix G = Matrix::Zero(4, 4);
  G(0, 1) = 1.0;
  G(1, 0) = 1.0;
  G.block<2, 1>(2, 0) = -dP;
  G.block<2, 1>(2, 1) = dP;
  G.block<2, 2>(2, 2) = it.lu.solve(it.Qm);
  return G;
}

BoundaryPartials CompassGait::h_partials(double, const Vector& xT, const Vector&,
                                         const Vector& sigma) const {
  check_sigma(sigma);
  BoundaryPartials out;
  out.dT = Vector::Zero(2);
  out.dT(1) = -sigma(1);
  out.dxT = Matrix::Zero(2, 4);
  out.dxT(0, 0) = 1.0;
  out.dxT(0, 1) = 1.0;
  out.dxT(1, 0) = 2.0 * params_.l * std::cos(xT(0) + sigma(0));
  out.dx0 = Matrix::Zero(2, 4);
  return out;
}

CostPartials CompassGait::c_partials(double T, const Vector&, double yT, const Vector& sigma) const {
  check_sigma(sigma);
  const double scale = params_.m * params_.g * sigma(1);
  if (!(std::abs(scale * T) > 0.0)) fail(ErrorCode::kSingularCost, "cost of transport needs v_avg*T != 0");
  CostPartials out;
  out.dT = -yT / (scale * T * T);
  out.dxT = Vector::Zero(4);
  out.dyT = 1.0 / (scale * T);
  return out;
}

std::optional<double> CompassGait::quadratic_input_weight(const Vector&) const { return params_.k(); }

std::string to_string(Branch b) { return b == Branch::kShort ? "short" : "long"; }

Branch branch_from_string(const std::string& s) {
  if (s == "short") return Branch::kShort;
  if (s == "long") return Branch::kLong;
  fail(ErrorCode::kContractViolation, "unknown passive branch '" + s + "'");
}

namespace {

// Linear periodicity/event map of the small-amplitude hybrid system in (x0, gamma).
Eigen::Matrix<double, 5, 5> linear_shooting_matrix(const Matrix& A, const Matrix& G, double T) {
  const Matrix Phi = (A * T).exp();
  Eigen::Matrix<double, 5, 5> S = Eigen::Matrix<double, 5, 5>::Zero();
  S.topLeftCorner<4, 4>() = G * Phi - Matrix::Identity(4, 4);
  S.block<1, 4>(4, 0) = Phi.row(0) + Phi.row(1);
  S(4, 4) = 2.0;
  return S;
}

}  // namespace

PassiveGuess linearized_passive_guess(const WalkerParams& p, double v_avg, Branch branch) {
  const CompassGait model(p);
  const Vector zero = Vector::Zero(4);
  const Vector sigma = model.nominal_parameters();
  const Matrix A = model.f_partials(zero, Vector::Zero(1), sigma).fx;
  const Matrix G = model.g_partial(zero, sigma);
  const double t0 = std::sqrt(p.l / p.g);

  auto det = [&](double T) { return linear_shooting_matrix(A, G, T).determinant(); };
  std::vector<double> roots;
  const double dT = 0.005 * t0;
  double prev_T = 0.3 * t0, prev = det(prev_T);
  for (double T = prev_T + dT; T < 8.0 * t0 && roots.size() < 2; T += dT) {
    const double cur = det(T);
    if (prev == 0.0 || prev * cur < 0.0) {
      double lo = prev_T, hi = T, flo = prev;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = det(mid);
        if (flo * fm <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_T = T;
    prev = cur;
  }
  if (roots.size() < 2) fail(ErrorCode::kSeedFailure, "linearized walker has no passive gait pair");
  const double T = branch == Branch::kShort ? roots[0] : roots[1];

  Eigen::JacobiSVD<Eigen::Matrix<double, 5, 5>> svd(linear_shooting_matrix(A, G, T),
                                                     Eigen::ComputeFullV);
  Eigen::Matrix<double, 5, 1> v = svd.matrixV().col(4);
  const Vector xT = (A * T).exp() * v.head<4>();
  // omega ~ 2 l (theta_sw(T) + gamma) - v_avg T in the small-angle limit
  const double per_unit = 2.0 * p.l * (xT(0) + v(4));
  if (std::abs(per_unit) < 1e-12) fail(ErrorCode::kSeedFailure, "degenerate linear passive mode");
  v *= v_avg * T / per_unit;

  PassiveGuess out;
  out.T = T;
  out.x0 = v.head<4>();
  out.gamma = v(4);
  out.v_avg = v_avg;
  return out;
}

PassiveGait find_passive_gait_at(const CompassGait& model, double v_avg, Branch branch,
                                 const PassiveSearchOptions& options) {
  require(v_avg > 0.0, "passive gait needs a positive average speed");
  const double start = 0.25 * v_avg;
  const PassiveGuess guess = linearized_passive_guess(model.params(), start, branch);
  PassiveGaitRequest req;
  req.sigma = Vector(2);
  req.sigma << guess.gamma, start;
  req.free_index = 0;
  req.T_guess = guess.T;
  req.x0_guess = guess.x0;
  req.branch_tag = to_string(branch);
  return sweep_passive_gait(model, find_passive_gait(model, req, options), 1, v_avg, 3, options);
}

}  // namespace gaitforge::compass_gait
