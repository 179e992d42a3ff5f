#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "gaitforge/error.hpp"
#include "gaitforge/integrate.hpp"

namespace gaitforge {
namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

TEST(Dopri5, ExponentialDecay) {
  const DenseTrajectory tr =
      integrate_fixed_horizon([](double, const Vector& z, Vector& dz) { dz = -z; }, scalar(1.0), 1.0);
  EXPECT_NEAR(tr.terminal_state()(0), std::exp(-1.0), 1e-8);
}

TEST(Dopri5, HarmonicOscillatorClosesOrbit) {
  Vector z0(2);
  z0 << 1.0, 0.0;
  const DenseTrajectory tr = integrate_fixed_horizon(
      [](double, const Vector& z, Vector& dz) {
        dz.resize(2);
        dz << z(1), -z(0);
      },
      z0, 2.0 * std::numbers::pi);
  EXPECT_NEAR(tr.terminal_state()(0), 1.0, 1e-7);
  EXPECT_NEAR(tr.terminal_state()(1), 0.0, 1e-7);
}

TEST(Dopri5, EmptyHorizonReturnsInitialState) {
  Vector z0(3);
  z0 << 0.1, -2.0, 3.5;
  const DenseTrajectory tr = integrate_fixed_horizon([](double, const Vector& z, Vector& dz) { dz = z; }, z0, 0.0);
  EXPECT_EQ(tr.terminal_state(), z0);
  EXPECT_EQ(tr.accepted_steps(), 0);
}

TEST(Dopri5, NegativeHorizonIsDomainError) {
  try {
    integrate_fixed_horizon([](double, const Vector& z, Vector& dz) { dz = z; }, scalar(1.0), -1.0);
    FAIL() << "expected GaitError";
  } catch (const GaitError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
}

TEST(Dopri5, InvalidTolerancesRejected) {
  ToleranceConfig tol;
  tol.rel_tol = -1.0;
  EXPECT_THROW(tol.validate(), GaitError);
}

TEST(Dopri5, DenseOutputExactAtBreakpointsAndAccurateBetween) {
  const DenseTrajectory tr = integrate_fixed_horizon(
      [](double, const Vector& z, Vector& dz) {
        dz.resize(2);
        dz << z(1), -z(0);
      },
      (Vector(2) << 0.0, 1.0).finished(), 3.0);
  const auto& bp = tr.breakpoints();
  ASSERT_GE(bp.size(), 2u);
  EXPECT_EQ(bp.back(), 3.0);
  EXPECT_EQ(tr(3.0), tr.terminal_state());
  EXPECT_EQ(tr(0.0), tr.initial_state());
  for (double t = 0.0; t <= 3.0; t += 0.0371) {
    EXPECT_NEAR(tr(t)(0), std::sin(t), 1e-8) << t;
    EXPECT_NEAR(tr(t)(1), std::cos(t), 1e-8) << t;
  }
}

TEST(Dopri5, GridReplayReproducesAdaptiveRun) {
  const OdeRhs rhs = [](double t, const Vector& z, Vector& dz) { dz = -z * (1.0 + std::sin(t)); };
  const DenseTrajectory a = integrate_fixed_horizon(rhs, scalar(2.0), 4.0);
  const DenseTrajectory b = integrate_on_grid(rhs, scalar(2.0), 4.0, a.grid());
  EXPECT_EQ(a.terminal_state()(0), b.terminal_state()(0));
  const DenseTrajectory c = integrate_on_grid(rhs, scalar(2.0), 4.4, a.grid());
  EXPECT_EQ(c.accepted_steps(), a.accepted_steps());
  EXPECT_DOUBLE_EQ(c.final_time(), 4.4);
}

SensitivitySystem linear_scalar() {
  SensitivitySystem sys;
  sys.n_z = 1;
  sys.n_theta = 1;
  // theta is a, read from the sensitivity seed below
  sys.rhs = [](double, const Vector& z, Vector& dz) { dz = 0.5 * z; };
  sys.jacobians = [](double, const Vector& z, Matrix& Fz, Matrix& Ft) {
    Fz = Matrix::Constant(1, 1, 0.5);
    Ft = Matrix::Constant(1, 1, z(0));
  };
  return sys;
}

TEST(Sensitivities, LinearScalarInitialState) {
  const SensitivityResult r = integrate_with_sensitivities(linear_scalar(), scalar(1.0), 2.0);
  EXPECT_NEAR(r.S_z0(0, 0), std::exp(1.0), 1e-7);
}

TEST(Sensitivities, LinearScalarParameter) {
  const SensitivityResult r = integrate_with_sensitivities(linear_scalar(), scalar(1.0), 2.0);
  EXPECT_NEAR(r.S_theta(0, 0), 2.0 * std::exp(1.0), 1e-6);
}

TEST(Sensitivities, HorizonDerivativeIsTerminalRhs) {
  const SensitivityResult r = integrate_with_sensitivities(linear_scalar(), scalar(1.0), 2.0);
  EXPECT_EQ(r.S_T(0), 0.5 * r.zT(0));
}

// Compass-gait flow with a constant torque theta, checked against central
// differences of tightly integrated trajectories.
TEST(Sensitivities, CompassGaitMatchesCentralDifferences) {
  const auto& model = testing::walker();
  const Vector s = testing::sigma(0.0, 0.1);
  SensitivitySystem sys;
  sys.n_z = 4;
  sys.n_theta = 1;
  double torque = 0.02;
  sys.rhs = [&](double, const Vector& z, Vector& dz) { dz = model.f(z, scalar(torque), s); };
  sys.jacobians = [&](double, const Vector& z, Matrix& Fz, Matrix& Ft) {
    const DynamicsPartials p = model.f_partials(z, scalar(torque), s);
    Fz = p.fx;
    Ft = p.fu;
  };
  Vector z0(4);
  z0 << 0.2, -0.15, -0.3, 0.25;
  const double T = 1.3;
  const SensitivityResult r = integrate_with_sensitivities(sys, z0, T);

  const ToleranceConfig tight{1e-12, 1e-14, 200000};
  auto flow = [&](const Vector& x0, double u) {
    return integrate_fixed_horizon(
               [&](double, const Vector& z, Vector& dz) { dz = model.f(z, scalar(u), s); }, x0, T, tight)
        .terminal_state();
  };
  const double h = 1e-5;
  Matrix fd(4, 5);
  for (int j = 0; j < 4; ++j) {
    Vector e = Vector::Zero(4);
    e(j) = h;
    fd.col(j) = (flow(z0 + e, torque) - flow(z0 - e, torque)) / (2 * h);
  }
  fd.col(4) = (flow(z0, torque + h) - flow(z0, torque - h)) / (2 * h);
  Matrix an(4, 5);
  an << r.S_z0, r.S_theta;
  EXPECT_LE(scaled_max_error(an, fd), 1e-4);
}

}  // namespace
}  // namespace gaitforge
