#include "gaitforge/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gaitforge/error.hpp"

namespace gaitforge {

std::vector<std::string> ParameterizedOcp::parameter_names() const {
  std::vector<std::string> names;
  for (int i = 0; i < dimensions().n_sigma; ++i) names.push_back("sigma" + std::to_string(i));
  return names;
}

Vector ParameterizedOcp::nominal_parameters() const {
  return Vector::Zero(dimensions().n_sigma);
}

std::pair<Vector, Vector> ParameterizedOcp::probe_box() const {
  const int n = dimensions().n_x;
  return {Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)};
}

DynamicsPartials ParameterizedOcp::f_partials(const Vector& x, const Vector& u,
                                              const Vector& sigma) const {
  return fd::f_partials(*this, x, u, sigma);
}

StagePartials ParameterizedOcp::l_partials(const Vector& x, const Vector& u,
                                           const Vector& sigma) const {
  return fd::l_partials(*this, x, u, sigma);
}

Matrix ParameterizedOcp::g_partial(const Vector& x, const Vector& sigma) const {
  return fd::g_partial(*this, x, sigma);
}

BoundaryPartials ParameterizedOcp::h_partials(double T, const Vector& xT, const Vector& x0,
                                              const Vector& sigma) const {
  return fd::h_partials(*this, T, xT, x0, sigma);
}

CostPartials ParameterizedOcp::c_partials(double T, const Vector& xT, double yT,
                                          const Vector& sigma) const {
  return fd::c_partials(*this, T, xT, yT, sigma);
}

std::optional<double> ParameterizedOcp::quadratic_input_weight(const Vector&) const {
  return std::nullopt;
}

Vector ParameterizedOcp::h(double T, const Vector& xT, const Vector& x0,
                           const Vector& sigma) const {
  const Vector w = omega(T, xT, x0, sigma);
  Vector out(1 + w.size());
  out(0) = e(T, xT, x0, sigma);
  out.tail(w.size()) = w;
  return out;
}

namespace fd {

double step_for(double value) { return 1e-6 * std::max(1.0, std::abs(value)); }

namespace {

// Central difference of a vector-valued map with respect to a vector argument.
template <class F>
Matrix jacobian(const F& fn, const Vector& at) {
  const Vector base = fn(at);
  Matrix J(base.size(), at.size());
  Vector probe = at;
  for (int j = 0; j < at.size(); ++j) {
    const double h = step_for(at(j));
    probe(j) = at(j) + h;
    const Vector plus = fn(probe);
    probe(j) = at(j) - h;
    const Vector minus = fn(probe);
    probe(j) = at(j);
    J.col(j) = (plus - minus) / (2.0 * h);
  }
  return J;
}

template <class F>
double derivative(const F& fn, double at) {
  const double h = step_for(at);
  return (fn(at + h) - fn(at - h)) / (2.0 * h);
}

Vector as_vector(double v) { return Vector::Constant(1, v); }

}  // namespace

DynamicsPartials f_partials(const ParameterizedOcp& ocp, const Vector& x, const Vector& u,
                            const Vector& sigma) {
  return {jacobian([&](const Vector& z) { return ocp.f(z, u, sigma); }, x),
          jacobian([&](const Vector& v) { return ocp.f(x, v, sigma); }, u)};
}

StagePartials l_partials(const ParameterizedOcp& ocp, const Vector& x, const Vector& u,
                         const Vector& sigma) {
  const Matrix lx = jacobian([&](const Vector& z) { return as_vector(ocp.l(z, u, sigma)); }, x);
  const Matrix lu = jacobian([&](const Vector& v) { return as_vector(ocp.l(x, v, sigma)); }, u);
  return {lx.row(0).transpose(), lu.row(0).transpose()};
}

Matrix g_partial(const ParameterizedOcp& ocp, const Vector& x, const Vector& sigma) {
  return jacobian([&](const Vector& z) { return ocp.g(z, sigma); }, x);
}

BoundaryPartials h_partials(const ParameterizedOcp& ocp, double T, const Vector& xT,
                            const Vector& x0, const Vector& sigma) {
  BoundaryPartials out;
  const Vector h0 = ocp.h(T, xT, x0, sigma);
  out.dT.resize(h0.size());
  const double hT = step_for(T);
  out.dT = (ocp.h(T + hT, xT, x0, sigma) - ocp.h(T - hT, xT, x0, sigma)) / (2.0 * hT);
  out.dxT = jacobian([&](const Vector& z) { return ocp.h(T, z, x0, sigma); }, xT);
  out.dx0 = jacobian([&](const Vector& z) { return ocp.h(T, xT, z, sigma); }, x0);
  return out;
}

CostPartials c_partials(const ParameterizedOcp& ocp, double T, const Vector& xT, double yT,
                        const Vector& sigma) {
  CostPartials out;
  out.dT = derivative([&](double t) { return ocp.c(t, xT, yT, sigma); }, T);
  out.dxT = jacobian([&](const Vector& z) { return as_vector(ocp.c(T, z, yT, sigma)); }, xT)
                .row(0)
                .transpose();
  out.dyT = derivative([&](double y) { return ocp.c(T, xT, y, sigma); }, yT);
  return out;
}

}  // namespace fd

BoundaryConstraint eval_h(const ParameterizedOcp& ocp, double T, const Vector& xT,
                          const Vector& x0, const Vector& sigma) {
  const OcpDimensions d = ocp.dimensions();
  require(xT.size() == d.n_x && x0.size() == d.n_x, "eval_h: state dimension mismatch");
  require(sigma.size() == d.n_sigma, "eval_h: parameter dimension mismatch");
  require(T >= 0.0, "eval_h: negative horizon");
  BoundaryConstraint out{ocp.h(T, xT, x0, sigma)};
  require(out.values.size() == d.n_h(), "eval_h: model returned wrong constraint length");
  return out;
}

double eval_cost(const ParameterizedOcp& ocp, double T, const Vector& xT, double yT,
                 const Vector& sigma) {
  const OcpDimensions d = ocp.dimensions();
  require(xT.size() == d.n_x, "eval_cost: state dimension mismatch");
  require(sigma.size() == d.n_sigma, "eval_cost: parameter dimension mismatch");
  return ocp.c(T, xT, yT, sigma);
}

double scaled_max_error(const Matrix& a, const Matrix& b) {
  if (a.size() == 0 && b.size() == 0) return 0.0;
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-12);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

bool DiagnosticReport::ok() const {
  if (!issues.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const PartialCheck& c) { return c.passed; });
}

bool DiagnosticReport::flagged(std::string_view partial) const {
  for (const PartialCheck& c : checks) {
    if (c.name == partial && !c.passed) return true;
  }
  return false;
}

DiagnosticReport validate_ocp(const ParameterizedOcp& ocp, const ValidationOptions& options) {
  DiagnosticReport report;
  const OcpDimensions d = ocp.dimensions();
  const Vector sigma = ocp.nominal_parameters();
  if (sigma.size() != d.n_sigma) report.issues.push_back("nominal parameters have wrong length");
  if (static_cast<int>(ocp.parameter_names().size()) != d.n_sigma) {
    report.issues.push_back("parameter names have wrong length");
  }
  auto [lo, hi] = ocp.probe_box();
  std::mt19937 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample = [&](int n, const Vector& a, const Vector& b) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = a(i) + (b(i) - a(i)) * unit(rng);
    return v;
  };

  const char* names[] = {"f_x", "f_u", "l_x", "l_u", "g_x", "h_T", "h_xT", "h_x0", "c_T", "c_xT", "c_yT"};
  std::vector<double> worst(std::size(names), 0.0);

  for (int k = 0; k < options.probes; ++k) {
    const Vector x = sample(d.n_x, lo, hi);
    const Vector x0 = sample(d.n_x, lo, hi);
    const Vector u = sample(d.n_u, Vector::Constant(d.n_u, -1.0), Vector::Constant(d.n_u, 1.0));
    const double T = 0.5 + 2.0 * unit(rng);
    const double yT = 0.1 + unit(rng);

    const Vector fx = ocp.f(x, u, sigma);
    if (fx.size() != d.n_x) report.issues.push_back("f has wrong length");
    if (!fx.isApprox(ocp.f(x, u, sigma), 0.0)) report.issues.push_back("f is not repeatable");
    if (ocp.g(x, sigma).size() != d.n_x) report.issues.push_back("g has wrong length");
    if (ocp.h(T, x, x0, sigma).size() != d.n_h()) report.issues.push_back("h has wrong length");

    const DynamicsPartials fa = ocp.f_partials(x, u, sigma);
    const DynamicsPartials ff = fd::f_partials(ocp, x, u, sigma);
    const StagePartials la = ocp.l_partials(x, u, sigma);
    const StagePartials lf = fd::l_partials(ocp, x, u, sigma);
    const Matrix ga = ocp.g_partial(x, sigma);
    const Matrix gf = fd::g_partial(ocp, x, sigma);
    const BoundaryPartials ha = ocp.h_partials(T, x, x0, sigma);
    const BoundaryPartials hf = fd::h_partials(ocp, T, x, x0, sigma);
    const CostPartials ca = ocp.c_partials(T, x, yT, sigma);
    const CostPartials cf = fd::c_partials(ocp, T, x, yT, sigma);

    if (fa.fx.rows() != d.n_x || fa.fx.cols() != d.n_x || fa.fu.rows() != d.n_x ||
        fa.fu.cols() != d.n_u) {
      report.issues.push_back("f partials have wrong shape");
      break;
    }
    const double errs[] = {
        scaled_max_error(fa.fx, ff.fx),
        scaled_max_error(fa.fu, ff.fu),
        scaled_max_error(la.lx, lf.lx),
        scaled_max_error(la.lu, lf.lu),
        scaled_max_error(ga, gf),
        scaled_max_error(ha.dT, hf.dT),
        scaled_max_error(ha.dxT, hf.dxT),
        scaled_max_error(ha.dx0, hf.dx0),
        scaled_max_error(Vector::Constant(1, ca.dT), Vector::Constant(1, cf.dT)),
        scaled_max_error(ca.dxT, cf.dxT),
        scaled_max_error(Vector::Constant(1, ca.dyT), Vector::Constant(1, cf.dyT)),
    };
    for (std::size_t i = 0; i < worst.size(); ++i) worst[i] = std::max(worst[i], errs[i]);
  }

  for (std::size_t i = 0; i < worst.size(); ++i) {
    report.checks.push_back({names[i], worst[i], worst[i] <= options.tolerance});
  }
  std::sort(report.issues.begin(), report.issues.end());
  report.issues.erase(std::unique(report.issues.begin(), report.issues.end()), report.issues.end());
  return report;
}

}  // namespace gaitforge
