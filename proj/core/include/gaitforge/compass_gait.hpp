#pragma once

#include <string>

#include "gaitforge/ocp.hpp"
#include "gaitforge/reconstruct.hpp"

namespace gaitforge::compass_gait {

// Which entries go on the diagonal of the mass matrix.
//  kStandard:  M11 = m_l b^2, M22 = (m_h + m_l) l^2 + m_l a^2
//  kAsPrinted: M11 = m_h b^2, M22 = (m_h + m_l) l^2 + m a^2
enum class MassMatrixConvention { kStandard, kAsPrinted };

std::string to_string(MassMatrixConvention c);
MassMatrixConvention convention_from_string(const std::string& s);

struct WalkerParams {
  double m = 1.0;     // total mass, normalizes the cost
  double m_h = 0.5;   // hip
  double m_l = 0.25;  // each leg
  double a = 0.5;     // foot to leg mass
  double b = 0.5;     // leg mass to hip
  double l = 1.0;     // leg length
  double g = 1.0;
  MassMatrixConvention convention = MassMatrixConvention::kStandard;

  // Input weight 1 / (m sqrt(g l^3)).
  double k() const;
  void validate() const;
};

// State x = (theta_sw, theta_st, dtheta_sw, dtheta_st), angles from the slope
// normal, u = hip torque. Parameters sigma = (gamma [rad], v_avg).
Eigen::Matrix2d mass_matrix(double alpha, const WalkerParams& p);
Vector continuous_rhs(const Vector& x, double u, const WalkerParams& p);
Vector impact_map(const Vector& x, const WalkerParams& p);

class CompassGait final : public ParameterizedOcp {
 public:
  explicit CompassGait(WalkerParams params = {});

  const WalkerParams& params() const { return params_; }

  std::string name() const override { return "compass-gait"; }
  OcpDimensions dimensions() const override { return {4, 1, 1, 2}; }
  std::vector<std::string> parameter_names() const override { return {"gamma", "v_avg"}; }
  Vector nominal_parameters() const override;
  std::pair<Vector, Vector> probe_box() const override;

  Vector f(const Vector& x, const Vector& u, const Vector& sigma) const override;
  Vector g(const Vector& x, const Vector& sigma) const override;
  double e(double T, const Vector& xT, const Vector& x0, const Vector& sigma) const override;
  Vector omega(double T, const Vector& xT, const Vector& x0, const Vector& sigma) const override;
  double l(const Vector& x, const Vector& u, const Vector& sigma) const override;
  double c(double T, const Vector& xT, double yT, const Vector& sigma) const override;

  DynamicsPartials f_partials(const Vector& x, const Vector& u, const Vector& sigma) const override;
  StagePartials l_partials(const Vector& x, const Vector& u, const Vector& sigma) const override;
  Matrix g_partial(const Vector& x, const Vector& sigma) const override;
  BoundaryPartials h_partials(double T, const Vector& xT, const Vector& x0,
                              const Vector& sigma) const override;
  CostPartials c_partials(double T, const Vector& xT, double yT, const Vector& sigma) const override;
  std::optional<double> quadratic_input_weight(const Vector& sigma) const override;

 private:
  WalkerParams params_;
};

enum class Branch { kShort, kLong };

std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

struct PassiveGuess {
  double T = 0.0;
  Vector x0;
  double gamma = 0.0;
  double v_avg = 0.0;
};

// Small-amplitude passive gait from the linearized hybrid system, scaled so
// that its average velocity is v_avg. Only a starting point for Newton.
PassiveGuess linearized_passive_guess(const WalkerParams& p, double v_avg, Branch branch);

// Passive gait of one branch at v_avg with gamma free: linearized guess at
// v_avg / 4, then three sweep increments in v_avg.
PassiveGait find_passive_gait_at(const CompassGait& model, double v_avg, Branch branch,
                                 const PassiveSearchOptions& options = {});

}  // namespace gaitforge::compass_gait
