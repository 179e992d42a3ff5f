#include "gaitforge/bases.hpp"

#include <algorithm>
#include <cmath>

#include "gaitforge/error.hpp"

namespace gaitforge {

std::string to_string(BasisKind kind) {
  return kind == BasisKind::kBezier ? "bezier" : "bspline";
}

BasisKind basis_from_string(const std::string& s) {
  if (s == "bezier") return BasisKind::kBezier;
  if (s == "bspline") return BasisKind::kCubicBSpline;
  fail(ErrorCode::kContractViolation, "unknown basis '" + s + "'");
}

std::string to_string(BezierTime t) { return t == BezierTime::kRaw ? "raw" : "normalized"; }

BezierTime bezier_time_from_string(const std::string& s) {
  if (s == "raw") return BezierTime::kRaw;
  if (s == "normalized") return BezierTime::kNormalized;
  fail(ErrorCode::kContractViolation, "unknown Bezier time argument '" + s + "'");
}

InputBasis::InputBasis(BasisKind kind, int n_xi, BezierTime bezier_time)
    : kind_(kind), n_xi_(n_xi), bezier_time_(bezier_time) {
  if (kind == BasisKind::kBezier) {
    require(n_xi >= 2, "Bezier basis needs at least two coefficients");
  } else {
    require(n_xi >= 4, "cubic B-spline basis needs at least four coefficients");
  }
}

double InputBasis::normalized(double t, double T) {
  if (!(T > 0.0)) fail(ErrorCode::kDomain, "basis evaluation needs T > 0");
  return t / T;
}

Vector InputBasis::knots() const {
  const int nseg = segments();
  Vector k(n_xi_ + 4);
  for (int i = 0; i < k.size(); ++i) k(i) = static_cast<double>(i - 3) / nseg;
  return k;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Vector bernstein(int n, double s) {  // degree n, n + 1 functions
  Vector b(n + 1);
  for (int j = 0; j <= n; ++j) b(j) = binomial(n, j) * std::pow(1.0 - s, n - j) * std::pow(s, j);
  return b;
}

// Cox-de Boor on knots tau; B_{i,0} is the indicator of the active interval.
Matrix cox_de_boor(const Vector& tau, int active, double s, int degree) {
  const int m = static_cast<int>(tau.size()) - 1;  // number of degree-0 functions
  Matrix B = Matrix::Zero(degree + 1, m);
  B(0, active) = 1.0;
  for (int k = 1; k <= degree; ++k) {
    for (int i = 0; i + k < m; ++i) {
      double v = 0.0;
      const double d1 = tau(i + k) - tau(i);
      const double d2 = tau(i + k + 1) - tau(i + 1);
      if (d1 > 0.0) v += (s - tau(i)) / d1 * B(k - 1, i);
      if (d2 > 0.0) v += (tau(i + k + 1) - s) / d2 * B(k - 1, i + 1);
      B(k, i) = v;
    }
  }
  return B;
}

}  // namespace

Vector InputBasis::weights(double s) const {
  if (kind_ == BasisKind::kBezier) return bernstein(n_xi_ - 1, s);
  const int nseg = segments();
  const int seg = std::clamp(static_cast<int>(std::floor(s * nseg)), 0, nseg - 1);
  const Matrix B = cox_de_boor(knots(), seg + 3, s, 3);
  return B.row(3).head(n_xi_).transpose();
}

Vector InputBasis::weight_derivatives(double s) const {
  if (kind_ == BasisKind::kBezier) {
    const int n = n_xi_ - 1;
    Vector d = Vector::Zero(n_xi_);
    const Vector lower = bernstein(n - 1, s);
    for (int j = 0; j <= n; ++j) {
      if (j >= 1) d(j) += n * lower(j - 1);
      if (j <= n - 1) d(j) -= n * lower(j);
    }
    return d;
  }
  const int nseg = segments();
  const int seg = std::clamp(static_cast<int>(std::floor(s * nseg)), 0, nseg - 1);
  const Vector tau = knots();
  const Matrix B = cox_de_boor(tau, seg + 3, s, 3);
  Vector d(n_xi_);
  for (int i = 0; i < n_xi_; ++i) {
    d(i) = 3.0 / (tau(i + 3) - tau(i)) * B(2, i) - 3.0 / (tau(i + 4) - tau(i + 1)) * B(2, i + 1);
  }
  return d;
}

double InputBasis::argument(double t, double T) const {
  const double s = normalized(t, T);
  return (kind_ == BasisKind::kBezier && bezier_time_ == BezierTime::kRaw) ? t : s;
}

double InputBasis::value(double t, double T, const Vector& xi) const {
  require(xi.size() == n_xi_, "coefficient vector has wrong length");
  return weights(argument(t, T)).dot(xi);
}

double InputBasis::dvalue_dT(double t, double T, const Vector& xi) const {
  if (kind_ == BasisKind::kBezier && bezier_time_ == BezierTime::kRaw) {
    normalized(t, T);
    return 0.0;
  }
  const double s = normalized(t, T);
  return -weight_derivatives(s).dot(xi) * s / T;
}

}  // namespace gaitforge
