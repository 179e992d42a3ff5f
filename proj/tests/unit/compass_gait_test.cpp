#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gaitforge/compass_gait.hpp"
#include "gaitforge/error.hpp"
#include "gaitforge/registry.hpp"

namespace gaitforge {
namespace {

namespace cg = compass_gait;
using testing::sigma;
using testing::walker;

Vector random_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> a(-0.5, 0.5), r(-1.0, 1.0);
  Vector x(4);
  x << a(rng), a(rng), r(rng), r(rng);
  return x;
}

TEST(MassMatrix, AsPrintedConventionAtZeroAngle) {
  cg::WalkerParams p;
  p.convention = cg::MassMatrixConvention::kAsPrinted;
  const Eigen::Matrix2d M = cg::mass_matrix(0.0, p);
  EXPECT_DOUBLE_EQ(M(0, 0), 0.125);
  EXPECT_DOUBLE_EQ(M(0, 1), -0.125);
  EXPECT_DOUBLE_EQ(M(1, 0), -0.125);
  EXPECT_DOUBLE_EQ(M(1, 1), 1.0);
}

TEST(MassMatrix, StandardConventionAtZeroAngle) {
  const Eigen::Matrix2d M = cg::mass_matrix(0.0, cg::WalkerParams{});
  EXPECT_DOUBLE_EQ(M(0, 0), 0.0625);
  EXPECT_DOUBLE_EQ(M(0, 1), -0.125);
  EXPECT_DOUBLE_EQ(M(1, 1), 0.8125);
}

TEST(Dynamics, UprightRestIsEquilibrium) {
  EXPECT_EQ(cg::continuous_rhs(Vector::Zero(4), 0.0, cg::WalkerParams{}), Vector::Zero(4));
}

// With both angles at zero gravity vanishes, so the accelerations are the
// pure velocity terms, which are quadratic in the rates.
TEST(Dynamics, VelocityTermsAreQuadratic) {
  const cg::WalkerParams p;
  Vector x(4);
  x << 0.0, 0.3, 0.4, -0.7;
  Vector x2 = x;
  x2.tail(2) *= 2.0;
  Vector xs = x;
  xs(1) = 0.0;
  const Vector a1 = cg::continuous_rhs(x, 0.0, p).tail(2);
  const Vector a2 = cg::continuous_rhs(x2, 0.0, p).tail(2);
  const Vector g = cg::continuous_rhs((Vector(4) << 0.0, 0.3, 0.0, 0.0).finished(), 0.0, p).tail(2);
  EXPECT_LE(((a2 - g) - 4.0 * (a1 - g)).norm(), 1e-13);
  (void)xs;
}

TEST(Impact, ZeroVelocitySwapsAngles) {
  Vector x(4);
  x << -0.2, 0.25, 0.0, 0.0;
  const Vector xp = cg::impact_map(x, cg::WalkerParams{});
  EXPECT_EQ(xp(0), 0.25);
  EXPECT_EQ(xp(1), -0.2);
  EXPECT_EQ(xp(2), 0.0);
  EXPECT_EQ(xp(3), 0.0);
}

TEST(Impact, RelabelingIsInvolution) {
  Vector x(4);
  x << -0.2, 0.25, 0.0, 0.0;
  const Vector twice = cg::impact_map(cg::impact_map(x, cg::WalkerParams{}), cg::WalkerParams{});
  EXPECT_EQ(twice.head(2), x.head(2));
}

// Angular momentum about the new stance foot and, for the trailing leg,
// about the hip, written out from the masses directly.
TEST(Impact, ConservesAngularMomentum) {
  const cg::WalkerParams p;
  std::mt19937 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_state(rng);
    const Vector xp = cg::impact_map(x, p);
    const double alpha = x(1) - x(0);
    const double ca = std::cos(alpha);
    const double mab = p.m_l * p.a * p.b;
    Eigen::Matrix2d Qm, Qp;
    Qm << -mab, -mab + (p.m_h * p.l * p.l + 2.0 * p.m_l * p.a * p.l) * ca, 0.0, -mab;
    Qp << p.m_l * p.b * (p.b - p.l * ca), p.m_l * p.l * (p.l - p.b * ca) + p.m_l * p.a * p.a + p.m_h * p.l * p.l,
        p.m_l * p.b * p.b, -p.m_l * p.b * p.l * ca;
    const Eigen::Vector2d before = Qm * x.tail<2>();
    const Eigen::Vector2d after = Qp * xp.tail<2>();
    EXPECT_LE((after - before).norm(), 1e-12 * std::max(1.0, before.norm()));
  }
}

TEST(Constraints, EventAndOperatingExamples) {
  Vector xT(4);
  xT << 0.21, -0.21, 0.5, 0.1;
  EXPECT_EQ(walker().e(2.0, xT, xT, sigma(0.0, 0.1)), 0.0);
  const double gamma = 0.01;
  xT(0) = -gamma;
  EXPECT_NEAR(walker().omega(2.0, xT, xT, sigma(gamma, 0.1))(0), -0.2, 1e-15);
}

TEST(Cost, StageCostExamples) {
  EXPECT_EQ(walker().l(Vector::Zero(4), Vector::Zero(1), sigma(0.0, 0.1)), 0.0);
  EXPECT_DOUBLE_EQ(walker().params().k(), 1.0);
  EXPECT_DOUBLE_EQ(walker().l(Vector::Zero(4), Vector::Ones(1), sigma(0.0, 0.1)), 0.5);
  EXPECT_EQ(walker().quadratic_input_weight(sigma(0.0, 0.1)).value(), 1.0);
}

TEST(Partials, AnalyticMatchCentralDifferences) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uu(-0.3, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector x = random_state(rng);
    const Vector u = Vector::Constant(1, uu(rng));
    const Vector s = sigma(0.003 * trial, 0.05 + 0.01 * trial);
    const DynamicsPartials a = walker().f_partials(x, u, s);
    const DynamicsPartials n = fd::f_partials(walker(), x, u, s);
    EXPECT_LE(scaled_max_error(a.fx, n.fx), 1e-6);
    EXPECT_LE(scaled_max_error(a.fu, n.fu), 1e-6);
    EXPECT_LE(scaled_max_error(walker().g_partial(x, s), fd::g_partial(walker(), x, s)), 1e-6);
    const BoundaryPartials ha = walker().h_partials(2.0, x, x, s);
    const BoundaryPartials hn = fd::h_partials(walker(), 2.0, x, x, s);
    EXPECT_LE(scaled_max_error(ha.dxT, hn.dxT), 1e-6);
    EXPECT_LE(scaled_max_error(ha.dT, hn.dT), 1e-6);
    const CostPartials ca = walker().c_partials(2.0, x, 0.01, s);
    const CostPartials cn = fd::c_partials(walker(), 2.0, x, 0.01, s);
    EXPECT_NEAR(ca.dT, cn.dT, 1e-6 * std::abs(cn.dT));
    EXPECT_NEAR(ca.dyT, cn.dyT, 1e-6 * std::abs(cn.dyT));
  }
}

TEST(Parameters, ValidationRejectsNonPositiveMass) {
  cg::WalkerParams p;
  p.m_h = 0.0;
  EXPECT_THROW(cg::CompassGait{p}, GaitError);
}

TEST(LinearizedGuess, BranchesAreOrderedByPeriod) {
  const cg::PassiveGuess s = cg::linearized_passive_guess(cg::WalkerParams{}, 0.025, cg::Branch::kShort);
  const cg::PassiveGuess l = cg::linearized_passive_guess(cg::WalkerParams{}, 0.025, cg::Branch::kLong);
  EXPECT_LT(s.T, l.T);
  EXPECT_GT(s.gamma, 0.0);
  EXPECT_GT(l.gamma, 0.0);
}

TEST(Conventions, StringRoundTrips) {
  EXPECT_EQ(cg::convention_from_string(cg::to_string(cg::MassMatrixConvention::kAsPrinted)),
            cg::MassMatrixConvention::kAsPrinted);
  EXPECT_EQ(cg::branch_from_string("long"), cg::Branch::kLong);
  EXPECT_THROW(cg::branch_from_string("medium"), GaitError);
}

TEST(Registry, BuildsCompassGaitWithOptions) {
  const auto names = registered_models();
  ASSERT_EQ(names.size(), 1u);
  EXPECT_EQ(names[0], "compass-gait");
  const auto model = make_model("compass-gait", {{"mass_matrix", "as-printed"}});
  const auto* walker_model = dynamic_cast<const cg::CompassGait*>(model.get());
  ASSERT_NE(walker_model, nullptr);
  EXPECT_EQ(walker_model->params().convention, cg::MassMatrixConvention::kAsPrinted);
}

TEST(Registry, UnknownNamesAndOptionsRejected) {
  EXPECT_THROW(make_model("biped-3d"), GaitError);
  EXPECT_THROW(make_model("compass-gait", {{"friction", "1"}}), GaitError);
}

}  // namespace
}  // namespace gaitforge
