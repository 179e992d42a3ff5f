#pragma once

#include <string>

#include "gaitforge/compass_gait.hpp"
#include "gaitforge/continuation.hpp"
#include "gaitforge/reconstruct.hpp"

namespace gaitforge::testing {

namespace cg = gaitforge::compass_gait;

double deg(double radians);
double rad(double degrees);
Vector sigma(double gamma, double v_avg);

const cg::CompassGait& walker();

// Passive gaits and indirect seeds at v_avg = 0.1, computed once per process.
const PassiveGait& passive_gait(cg::Branch branch);
const IndirectSeed& passive_seed(cg::Branch branch);

// Continuation in gamma from the short-branch seed down to level ground.
struct GammaRun {
  GaitLibrary library;
  Vector base;  // parameters at the seed
  int N = 0;    // length of chi

  IndirectDecision chi(int k) const;
  Vector sigma(int k) const;
};
const GammaRun& gamma_run();

// Last point of the gamma run: gamma = 0, v_avg = 0.1.
IndirectDecision level_ground();
Vector level_ground_sigma();

// Two-state oscillator with a single event constraint and no operating
// constraints. All partials come from the finite-difference defaults.
class ToyOscillator final : public ParameterizedOcp {
 public:
  std::string name() const override { return "toy-oscillator"; }
  OcpDimensions dimensions() const override { return {2, 1, 0, 1}; }

  Vector f(const Vector& x, const Vector& u, const Vector& sigma) const override;
  Vector g(const Vector& x, const Vector& sigma) const override;
  double e(double T, const Vector& xT, const Vector& x0, const Vector& sigma) const override;
  Vector omega(double T, const Vector& xT, const Vector& x0, const Vector& sigma) const override;
  double l(const Vector& x, const Vector& u, const Vector& sigma) const override;
  double c(double T, const Vector& xT, double yT, const Vector& sigma) const override;
};

// Compass gait whose analytic input partial has the wrong sign.
class FlippedInputModel final : public ParameterizedOcp {
 public:
  std::string name() const override { return "flipped-input"; }
  OcpDimensions dimensions() const override { return inner_.dimensions(); }
  std::pair<Vector, Vector> probe_box() const override { return inner_.probe_box(); }
  Vector nominal_parameters() const override { return inner_.nominal_parameters(); }

  Vector f(const Vector& x, const Vector& u, const Vector& s) const override { return inner_.f(x, u, s); }
  Vector g(const Vector& x, const Vector& s) const override { return inner_.g(x, s); }
  double e(double T, const Vector& xT, const Vector& x0, const Vector& s) const override {
    return inner_.e(T, xT, x0, s);
  }
  Vector omega(double T, const Vector& xT, const Vector& x0, const Vector& s) const override {
    return inner_.omega(T, xT, x0, s);
  }
  double l(const Vector& x, const Vector& u, const Vector& s) const override { return inner_.l(x, u, s); }
  double c(double T, const Vector& xT, double yT, const Vector& s) const override { return inner_.c(T, xT, yT, s); }
  DynamicsPartials f_partials(const Vector& x, const Vector& u, const Vector& s) const override;

 private:
  cg::CompassGait inner_;
};

// Fresh empty directory under the system temp path.
std::string temp_dir(const std::string& name);

}  // namespace gaitforge::testing
