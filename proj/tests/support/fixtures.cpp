#include "fixtures.hpp"

#include <filesystem>
#include <map>
#include <numbers>

#include "gaitforge/curves.hpp"
#include "gaitforge/error.hpp"

namespace gaitforge::testing {

double deg(double radians) { return radians * 180.0 / std::numbers::pi; }
double rad(double degrees) { return degrees * std::numbers::pi / 180.0; }

Vector sigma(double gamma, double v_avg) {
  Vector s(2);
  s << gamma, v_avg;
  return s;
}

const cg::CompassGait& walker() {
  static const cg::CompassGait model;
  return model;
}

const PassiveGait& passive_gait(cg::Branch branch) {
  static std::map<cg::Branch, PassiveGait> cache;
  auto it = cache.find(branch);
  if (it == cache.end()) it = cache.emplace(branch, cg::find_passive_gait_at(walker(), 0.1, branch)).first;
  return it->second;
}

const IndirectSeed& passive_seed(cg::Branch branch) {
  static std::map<cg::Branch, IndirectSeed> cache;
  auto it = cache.find(branch);
  if (it == cache.end()) it = cache.emplace(branch, seed_from_passive(walker(), passive_gait(branch))).first;
  return it->second;
}

IndirectDecision GammaRun::chi(int k) const {
  return IndirectDecision::unflatten(library.points.at(k).nu.head(N), walker().dimensions());
}

Vector GammaRun::sigma(int k) const {
  Vector s = base;
  s(0) = library.points.at(k).nu(N);
  return s;
}

const GammaRun& gamma_run() {
  static const GammaRun run = [] {
    const IndirectSeed& seed = passive_seed(cg::Branch::kShort);
    static const IndirectShooting shooter(walker());
    GammaRun r;
    r.base = seed.sigma;
    r.N = shooter.layout().size();
    Vector nu(r.N + 1);
    nu << seed.chi.flatten(), seed.sigma(0);
    ContinuationConfig cfg;
    cfg.sigma_end = 0.0;
    r.library = run_continuation(indirect_curve(shooter, seed.sigma, 0), nu, cfg);
    return r;
  }();
  return run;
}

IndirectDecision level_ground() {
  const GammaRun& r = gamma_run();
  return r.chi(static_cast<int>(r.library.points.size()) - 1);
}

Vector level_ground_sigma() { return sigma(0.0, 0.1); }

Vector ToyOscillator::f(const Vector& x, const Vector& u, const Vector& s) const {
  Vector dx(2);
  dx << x(1), -s(0) * x(0) + u(0);
  return dx;
}

Vector ToyOscillator::g(const Vector& x, const Vector&) const {
  Vector xp(2);
  xp << -x(0), 0.8 * x(1);
  return xp;
}

double ToyOscillator::e(double, const Vector& xT, const Vector&, const Vector&) const { return xT(0) - 1.0; }

Vector ToyOscillator::omega(double, const Vector&, const Vector&, const Vector&) const { return Vector(0); }

double ToyOscillator::l(const Vector& x, const Vector& u, const Vector&) const {
  return 0.5 * u.squaredNorm() + 0.1 * x(0) * x(0);
}

double ToyOscillator::c(double T, const Vector&, double yT, const Vector&) const { return yT / T; }

DynamicsPartials FlippedInputModel::f_partials(const Vector& x, const Vector& u, const Vector& s) const {
  DynamicsPartials p = inner_.f_partials(x, u, s);
  p.fu = -p.fu;
  return p;
}

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gaitforge-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace gaitforge::testing
