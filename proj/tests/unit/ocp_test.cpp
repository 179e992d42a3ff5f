#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gaitforge/error.hpp"
#include "gaitforge/ocp.hpp"

namespace gaitforge {
namespace {

using testing::sigma;
using testing::walker;

TEST(EvalH, SymmetricTouchdownOnLevelGroundHasZeroEvent) {
  Vector xT(4);
  xT << 0.3, -0.3, 0.1, -0.2;
  const BoundaryConstraint h = eval_h(walker(), 2.0, xT, xT, sigma(0.0, 0.1));
  EXPECT_EQ(h.event(), 0.0);
}

TEST(EvalH, StepLengthMatchingSpeedZeroesOperatingConstraint) {
  const double gamma = 0.01, T = 2.2, v = 0.1;
  Vector xT(4);
  xT << std::asin(v * T / 2.0) - gamma, 0.0, 0.0, 0.0;
  const BoundaryConstraint h = eval_h(walker(), T, xT, xT, sigma(gamma, v));
  ASSERT_EQ(h.operating().size(), 1);
  EXPECT_NEAR(h.operating()(0), 0.0, 1e-15);
}

TEST(EvalH, LevelGroundOptimumSatisfiesBothConstraints) {
  const IndirectDecision chi = testing::level_ground();
  const IndirectShooting shooter(walker());
  const IndirectTrajectory traj = shooter.trajectory(chi, testing::level_ground_sigma());
  const BoundaryConstraint h =
      eval_h(walker(), chi.T, traj.at(chi.T).x, chi.x0, testing::level_ground_sigma());
  EXPECT_LE(h.values.lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(EvalH, WrongStateLengthIsContractViolation) {
  try {
    eval_h(walker(), 1.0, Vector::Zero(3), Vector::Zero(4), sigma(0.0, 0.1));
    FAIL() << "expected GaitError";
  } catch (const GaitError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContractViolation);
  }
}

TEST(EvalCost, ZeroAccumulatedCostGivesZero) {
  EXPECT_EQ(eval_cost(walker(), 1.7, Vector::Zero(4), 0.0, sigma(0.0, 0.1)), 0.0);
}

TEST(EvalCost, NormalizationIdentity) {
  const double T = 2.3, v = 0.17;
  EXPECT_NEAR(eval_cost(walker(), T, Vector::Zero(4), 1.0 * 1.0 * v * T, sigma(0.0, v)), 1.0, 1e-15);
}

TEST(EvalCost, LevelGroundCostOfTransport) {
  const IndirectShooting shooter(walker());
  const double cost = shooter.evaluate(testing::level_ground(), testing::level_ground_sigma()).cost;
  EXPECT_NEAR(cost, 2.2095e-4, 0.02 * 2.2095e-4);
}

TEST(EvalCost, ZeroSpeedIsSingular) {
  try {
    eval_cost(walker(), 2.0, Vector::Zero(4), 1.0, sigma(0.0, 0.0));
    FAIL() << "expected GaitError";
  } catch (const GaitError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularCost);
  }
}

TEST(ValidateOcp, CompassGaitPartialsPass) {
  const DiagnosticReport report = validate_ocp(walker());
  EXPECT_TRUE(report.ok());
  for (const PartialCheck& c : report.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.max_rel_error;
}

TEST(ValidateOcp, WrongInputSignIsFlagged) {
  const testing::FlippedInputModel model;
  const DiagnosticReport report = validate_ocp(model);
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(report.flagged("f_u"));
  EXPECT_FALSE(report.flagged("f_x"));
  EXPECT_FALSE(report.flagged("g_x"));
}

TEST(ValidateOcp, ModelWithoutOperatingConstraints) {
  const testing::ToyOscillator toy;
  EXPECT_EQ(toy.dimensions().n_h(), 1);
  Vector x(2);
  x << 1.0, 0.5;
  EXPECT_EQ(toy.h(1.0, x, x, Vector::Ones(1)).size(), 1);
  EXPECT_TRUE(validate_ocp(toy).ok());
}

TEST(ScaledMaxError, RelativeToLargestReferenceEntry) {
  Matrix a(1, 2), b(1, 2);
  a << 1.0, 2.1;
  b << 1.0, 2.0;
  EXPECT_NEAR(scaled_max_error(a, b), 0.05, 1e-14);
}

}  // namespace
}  // namespace gaitforge
