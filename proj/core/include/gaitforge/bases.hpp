#pragma once

#include <string>

#include "gaitforge/types.hpp"

namespace gaitforge {

enum class BasisKind { kBezier, kCubicBSpline };

std::string to_string(BasisKind kind);
BasisKind basis_from_string(const std::string& s);

// Time argument of the Bernstein polynomials: raw time t, or s = t / T.
enum class BezierTime { kRaw, kNormalized };

std::string to_string(BezierTime t);
BezierTime bezier_time_from_string(const std::string& s);

// Scalar input u(t) = sum_j w_j xi_j on [0, T]. The B-spline uses uniform
// knots (i - 3) T / n_seg with n_seg = n_xi - 3, half-open intervals and the
// left limit at t = T; it is evaluated through s = t / T.
class InputBasis {
 public:
  InputBasis(BasisKind kind, int n_xi, BezierTime bezier_time = BezierTime::kRaw);

  BasisKind kind() const { return kind_; }
  BezierTime bezier_time() const { return bezier_time_; }
  int size() const { return n_xi_; }
  int segments() const { return kind_ == BasisKind::kCubicBSpline ? n_xi_ - 3 : 1; }

  // Knot values in normalized time, tau_i = (i - 3) / n_seg for i = 0..n_xi + 3.
  Vector knots() const;

  // Weights and their derivative in the basis argument (s, or raw t for kRaw Bezier).
  Vector weights(double arg) const;
  Vector weight_derivatives(double arg) const;
  double argument(double t, double T) const;

  double value(double t, double T, const Vector& xi) const;
  // Partial with respect to T at fixed t and xi.
  double dvalue_dT(double t, double T, const Vector& xi) const;
  Vector dvalue_dxi(double t, double T) const { return weights(argument(t, T)); }

  static double normalized(double t, double T);

 private:
  BasisKind kind_;
  int n_xi_;
  BezierTime bezier_time_;
};

}  // namespace gaitforge
