#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "gaitforge/error.hpp"
#include "gaitforge/reconstruct.hpp"

namespace gaitforge {
namespace {

using testing::deg;
using testing::walker;
namespace cg = compass_gait;

TEST(FindPassiveGait, LongBranchVerifiedByReintegration) {
  const PassiveGait& gait = testing::passive_gait(cg::Branch::kLong);
  EXPECT_LE(gait.residual_norm, 1e-10);
  const ToleranceConfig tight{1e-12, 1e-14, 200000};
  const Vector xT = integrate_fixed_horizon(
                        [&](double, const Vector& x, Vector& dx) { dx = walker().f(x, Vector::Zero(1), gait.sigma); },
                        gait.x0, gait.T, tight)
                        .terminal_state();
  EXPECT_LE((walker().g(xT, gait.sigma) - gait.x0).lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_LE(std::abs(walker().e(gait.T, xT, gait.x0, gait.sigma)), 1e-8);
  EXPECT_LE(std::abs(walker().omega(gait.T, xT, gait.x0, gait.sigma)(0)), 1e-8);
}

TEST(FindPassiveGait, BranchSlopesAtReferenceSpeed) {
  EXPECT_NEAR(deg(testing::passive_gait(cg::Branch::kShort).sigma(0)), 0.2199, 0.01);
  EXPECT_NEAR(deg(testing::passive_gait(cg::Branch::kLong).sigma(0)), 0.1963, 0.01);
  EXPECT_LT(testing::passive_gait(cg::Branch::kShort).T, testing::passive_gait(cg::Branch::kLong).T);
}

TEST(FindPassiveGait, StandstillGuessRejected) {
  PassiveGaitRequest req;
  req.sigma = testing::sigma(0.0, 0.1);
  req.T_guess = 0.05;
  req.x0_guess = Vector::Zero(4);
  try {
    find_passive_gait(walker(), req);
    FAIL() << "expected GaitError";
  } catch (const GaitError& e) {
    EXPECT_TRUE(e.code() == ErrorCode::kSeedFailure || e.code() == ErrorCode::kNonConvergence)
        << to_string(e.code());
  }
}

TEST(ReconstructQ, ClosedFormForCostOfTransport) {
  const PassiveGait& gait = testing::passive_gait(cg::Branch::kLong);
  const double q = reconstruct_q(walker(), gait);
  EXPECT_NEAR(q, 1.0 / (1.0 * 1.0 * 0.1 * gait.T), 1e-12);
  EXPECT_NEAR(1.0 / (0.1 * 2.40695), 4.1546, 1e-4);
}

TEST(ReconstructQ, DoublingSpeedHalvesMultiplier) {
  PassiveGait gait = testing::passive_gait(cg::Branch::kLong);
  const double q1 = reconstruct_q(walker(), gait);
  gait.sigma(1) *= 2.0;
  EXPECT_NEAR(reconstruct_q(walker(), gait), 0.5 * q1, 1e-12);
}

TEST(ObservabilityStack, InputCostRowsVanishForQuadraticCost) {
  const PassiveGait& gait = testing::passive_gait(cg::Branch::kLong);
  const ObservabilityStack st = build_observability_stack(walker(), gait.x0, 5.0, gait.sigma);
  EXPECT_LE(st.b_tilde.lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_GE(st.A_tilde.rows(), 4);
  EXPECT_EQ(st.A.rows(), 4);
}

TEST(ObservabilityStack, SingleRowIsInsufficient) {
  const PassiveGait& gait = testing::passive_gait(cg::Branch::kLong);
  try {
    build_observability_stack(walker(), gait.x0, 5.0, gait.sigma, 1);
    FAIL() << "expected GaitError";
  } catch (const GaitError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kObservabilityFailure);
  }
}

// Row two is d/dt f_u(x(t))^T at t = 0 minus f_u^T f_x^T, with the time
// derivative taken by central differences along the integrated orbit.
TEST(ObservabilityStack, SecondRowMatchesFlowDerivative) {
  const PassiveGait& gait = testing::passive_gait(cg::Branch::kLong);
  const Vector u0 = Vector::Zero(1);
  const ObservabilityStack st = build_observability_stack(walker(), gait.x0, 5.0, gait.sigma, 4);
  const ToleranceConfig tight{1e-13, 1e-15, 200000};
  auto flow = [&](double dt) {
    const double sgn = dt >= 0 ? 1.0 : -1.0;
    return integrate_fixed_horizon(
               [&](double, const Vector& x, Vector& dx) { dx = sgn * walker().f(x, u0, gait.sigma); }, gait.x0,
               std::abs(dt), tight)
        .terminal_state();
  };
  const double h = 1e-4;
  const Matrix fu_plus = fd::f_partials(walker(), flow(h), u0, gait.sigma).fu;
  const Matrix fu_minus = fd::f_partials(walker(), flow(-h), u0, gait.sigma).fu;
  const DynamicsPartials at0 = fd::f_partials(walker(), gait.x0, u0, gait.sigma);
  const Vector oracle = (fu_plus - fu_minus) / (2 * h) - at0.fx * at0.fu;
  const Vector row = st.A_tilde.row(1).transpose();
  EXPECT_LE((row - oracle).norm(), 1e-4 * oracle.norm());
  EXPECT_LE((st.A_tilde.row(0).transpose() - at0.fu).norm(), 1e-8 * at0.fu.norm());
}

TEST(ReconstructCostate, SyntheticIdentityStack) {
  ObservabilityStack st;
  st.A = Matrix::Identity(4, 4);
  st.b = (Vector(4) << 1, 2, 3, 4).finished();
  const Vector p = reconstruct_costate(st, 2.0);
  EXPECT_EQ(p, (Vector(4) << 2, 4, 6, 8).finished());
}

TEST(ReconstructCostate, ZeroRightHandSideGivesZero) {
  ObservabilityStack st;
  st.A = Matrix::Random(4, 4) + 4.0 * Matrix::Identity(4, 4);
  st.b = Vector::Zero(4);
  EXPECT_EQ(reconstruct_costate(st, 3.0), Vector::Zero(4));
  st.b = Vector::Ones(4);
  EXPECT_EQ(reconstruct_costate(st, 0.0), Vector::Zero(4));
}

TEST(ReconstructLambda, PassiveSeedHasZeroMultiplier) {
  const PassiveGait& gait = testing::passive_gait(cg::Branch::kLong);
  const LambdaReconstruction lr = reconstruct_lambda(walker(), gait, Vector::Zero(4), Vector::Zero(4), 0.0);
  EXPECT_EQ(lr.lambda.size(), 2);
  EXPECT_LE(lr.lambda.lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_EQ(lr.rank, 2);
}

// Static three-state model whose constraints read the first two terminal
// states, so the multiplier system matrix is the padded identity.
class PaddedIdentityBoundary final : public ParameterizedOcp {
 public:
  std::string name() const override { return "padded-identity"; }
  OcpDimensions dimensions() const override { return {3, 1, 1, 1}; }
  Vector f(const Vector&, const Vector& u, const Vector&) const override {
    return (Vector(3) << 0.0, 0.0, u(0)).finished();
  }
  Vector g(const Vector& x, const Vector&) const override { return x; }
  double e(double, const Vector& xT, const Vector&, const Vector&) const override { return xT(0); }
  Vector omega(double, const Vector& xT, const Vector&, const Vector&) const override {
    return Vector::Constant(1, xT(1));
  }
  double l(const Vector&, const Vector& u, const Vector&) const override { return 0.5 * u.squaredNorm(); }
  double c(double, const Vector&, double yT, const Vector&) const override { return yT; }
};

TEST(ReconstructLambda, PaddedIdentityProjectsRightHandSide) {
  const PaddedIdentityBoundary model;
  PassiveGait gait;
  gait.T = 1.0;
  gait.x0 = Vector::Zero(3);
  gait.sigma = Vector::Zero(1);
  const LambdaReconstruction lr =
      reconstruct_lambda(model, gait, Vector::Zero(3), (Vector(3) << 1.0, 0.0, 0.0).finished(), 0.0);
  EXPECT_EQ(lr.rank, 2);
  EXPECT_NEAR(lr.lambda(0), 1.0, 1e-9);
  EXPECT_NEAR(lr.lambda(1), 0.0, 1e-9);
}

TEST(SeedFromPassive, StructureOfStartingPoint) {
  const IndirectSeed& seed = testing::passive_seed(cg::Branch::kLong);
  const PassiveGait& gait = testing::passive_gait(cg::Branch::kLong);
  EXPECT_EQ(seed.chi.T, gait.T);
  EXPECT_EQ(seed.chi.x0, gait.x0);
  EXPECT_EQ(seed.chi.p0, Vector::Zero(4));
  EXPECT_NEAR(seed.chi.q, 1.0 / (0.1 * gait.T), 1e-12);
  EXPECT_EQ(seed.chi.u0, Vector::Zero(1));
  EXPECT_EQ(seed.chi.lambda, Vector::Zero(2));
  EXPECT_LE(seed.diagnostics.residual_norm, 1e-8);
}

TEST(SeedFromPassive, SeedCostIsZero) {
  const IndirectSeed& seed = testing::passive_seed(cg::Branch::kLong);
  EXPECT_EQ(IndirectShooting(walker()).evaluate(seed.chi, seed.sigma).cost, 0.0);
}

TEST(SeedFromPassive, AugmentedJacobianHasFullRank) {
  const IndirectSeed& seed = testing::passive_seed(cg::Branch::kLong);
  const JacobianResult J = IndirectShooting(walker()).jacobian(seed.chi, seed.sigma, {0});
  Eigen::FullPivLU<Matrix> lu(J.R_sigma);
  lu.setThreshold(1e-10);
  EXPECT_EQ(lu.rank(), J.R_sigma.rows());
}

TEST(ChebyshevDerivatives, ExactForPolynomials) {
  const int n = 12;
  const double delta = 0.3;
  Matrix samples(n + 1, 1);
  for (int j = 0; j <= n; ++j) {
    const double t = delta * std::cos(std::numbers::pi * j / n);
    samples(j, 0) = 1.0 + 2.0 * t - 3.0 * t * t + 0.5 * t * t * t * t;
  }
  const Matrix d = chebyshev_center_derivatives(samples, 4, delta);
  EXPECT_NEAR(d(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(d(1, 0), 2.0, 1e-11);
  EXPECT_NEAR(d(2, 0), -6.0, 1e-9);
  EXPECT_NEAR(d(3, 0), 0.0, 1e-7);
  EXPECT_NEAR(d(4, 0), 12.0, 1e-5);
}

}  // namespace
}  // namespace gaitforge
