#include "gaitforge/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gaitforge/compass_gait.hpp"
#include "gaitforge/continuation.hpp"
#include "gaitforge/curves.hpp"
#include "gaitforge/error.hpp"
#include "gaitforge/parallel.hpp"
#include "gaitforge/reconstruct.hpp"
#include "json.hpp"

#ifndef GAITFORGE_VERSION
#define GAITFORGE_VERSION "unknown"
#endif

namespace gaitforge::cli {

using nlohmann::json;

bool is_angle(const std::string& parameter) { return parameter == "gamma"; }

double to_display(const std::string& parameter, double internal) {
  return is_angle(parameter) ? internal * 180.0 / std::numbers::pi : internal;
}

double from_display(const std::string& parameter, double shown) {
  return is_angle(parameter) ? shown * std::numbers::pi / 180.0 : shown;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string shortnum(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

int parameter_index(const ParameterizedOcp& model, const std::string& name) {
  const std::vector<std::string> names = model.parameter_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw InputError("model '" + model.name() + "' has no parameter '" + name + "' (parameters: " + known + ")");
  }
  return static_cast<int>(it - names.begin());
}

std::string display_name(const std::string& parameter) {
  return is_angle(parameter) ? parameter + "_deg" : parameter;
}

LibraryMetadata base_metadata(const ParameterizedOcp& model, const ModelOptions& options,
                              const RunSettings& run) {
  LibraryMetadata m;
  m.model = model.name();
  m.model_options = options;
  m.parameter_names = model.parameter_names();
  m.tolerances = run.tolerances;
  m.artifact_version = GAITFORGE_VERSION;
  m.timestamp = utc_timestamp();
  return m;
}

Vector with_parameter(Vector sigma, int index, double value) {
  sigma(index) = value;
  return sigma;
}

double condition_number(const Matrix& R) {
  const Vector s = Eigen::JacobiSVD<Matrix>(R).singularValues();
  return s(0) / s(s.size() - 1);
}

NewtonOptions newton_options(const RunSettings& run) {
  NewtonOptions o;
  o.tolerance = run.tolerances.newton;
  return o;
}

// A few Newton steps toward `tolerance`, keeping whichever iterate has the
// smaller residual.
std::pair<Vector, double> polish(const std::function<Vector(const Vector&)>& residual,
                                 const std::function<Linearization(const Vector&)>& linearize, const Vector& x,
                                 double tolerance) {
  const double r0 = residual(x).lpNorm<Eigen::Infinity>();
  NewtonOptions o;
  o.tolerance = tolerance;
  o.max_iterations = 6;
  try {
    const NewtonResult r = newton_solve(residual, linearize, x, o);
    const double r1 = r.residual.lpNorm<Eigen::Infinity>();
    if (r1 < r0) return {r.x, r1};
  } catch (const GaitError& e) {
    if (e.code() == ErrorCode::kContractViolation) throw;
  }
  return {x, r0};
}

constexpr double kPolishTolerance = 1e-13;

void write_series(const std::filesystem::path& path, const std::string& header,
                  const std::vector<std::pair<double, double>>& xy) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot open '" + path.string() + "' for writing");
  f << "# " << header << "\n";
  for (const auto& [x, y] : xy) f << num(x) << " " << num(y) << "\n";
}

void progress_line(std::ostream& err, const json& j) { err << j.dump() << "\n" << std::flush; }

}  // namespace

int cmd_passive(const PassiveCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream&) {
  const auto model = make_model(cmd.model, cmd.model_options);
  const OcpDimensions d = model->dimensions();
  const int v_index = parameter_index(*model, "v_avg");
  const ShootingOptions shooting = run.tolerances.shooting();
  PassiveSearchOptions search;
  search.tolerances = shooting.tolerances;

  PassiveGait gait;
  if (cmd.T_guess || !cmd.x0_guess.empty()) {
    if (!cmd.T_guess || static_cast<int>(cmd.x0_guess.size()) != d.n_x) {
      throw InputError("an explicit guess needs --t-guess and --x0-guess with " + std::to_string(d.n_x) +
                       " entries");
    }
    PassiveGaitRequest req;
    req.sigma = with_parameter(model->nominal_parameters(), v_index, cmd.v_avg);
    req.free_index = v_index == 0 ? 1 : 0;
    const std::string free_name = model->parameter_names()[req.free_index];
    if (cmd.gamma_guess) req.sigma(req.free_index) = from_display(free_name, *cmd.gamma_guess);
    req.T_guess = *cmd.T_guess;
    req.x0_guess = Eigen::Map<const Vector>(cmd.x0_guess.data(), d.n_x);
    req.branch_tag = cmd.branch;
    gait = find_passive_gait(*model, req, search);
  } else {
    const auto* walker = dynamic_cast<const compass_gait::CompassGait*>(model.get());
    if (walker == nullptr) {
      throw InputError("model '" + cmd.model + "' has no built-in passive guess; pass --t-guess and --x0-guess");
    }
    gait = compass_gait::find_passive_gait_at(*walker, cmd.v_avg, compass_gait::branch_from_string(cmd.branch),
                                              search);
  }
  gait.branch_tag = cmd.branch;

  SeedOptions seed_options;
  seed_options.consistency_tol = run.tolerances.newton;
  const IndirectSeed seed = seed_from_passive(*model, gait, shooting, seed_options);
  const IndirectShooting shooter(*model, shooting);

  LibraryFile file;
  file.metadata = base_metadata(*model, cmd.model_options, run);
  file.metadata.kind = "seed";
  file.metadata.fixed_parameters = seed.sigma;
  file.metadata.termination = "seed";
  PointRecord p = PointRecord::from(seed.chi, seed.sigma);
  p.cost = shooter.evaluate(seed.chi, seed.sigma).cost;
  p.residual_norm = seed.diagnostics.residual_norm;
  file.points.push_back(p);

  SeedRecord s;
  s.passive.T = gait.T;
  s.passive.x0 = gait.x0;
  s.passive.sigma = gait.sigma;
  s.passive.free_parameter = model->parameter_names()[gait.free_index];
  s.passive.branch = gait.branch_tag;
  s.passive.residual_norm = gait.residual_norm;
  s.passive.iterations = gait.iterations;
  s.residual = seed.diagnostics.residual;
  s.costate_mismatch = seed.diagnostics.costate_mismatch;
  s.lambda_rank = seed.diagnostics.lambda_rank;
  s.stack_depth = seed.diagnostics.stack_depth;
  s.selected_rows = seed.diagnostics.selected_rows;
  file.seed = s;
  write_library(cmd.output, file);

  const std::string free_name = s.passive.free_parameter;
  out << "passive gait (" << gait.branch_tag << "): " << display_name(free_name) << " = "
      << shortnum(to_display(free_name, gait.sigma(gait.free_index)), 10) << ", T = " << shortnum(gait.T, 10)
      << ", passive residual " << shortnum(gait.residual_norm, 3) << "\n"
      << "seed residual " << shortnum(seed.diagnostics.residual_norm, 3) << ", q = " << shortnum(seed.chi.q, 10)
      << ", observability depth " << seed.diagnostics.stack_depth << "\n"
      << "wrote " << cmd.output << "\n";
  return kSuccess;
}

int cmd_continue(const ContinueCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream& err) {
  const LibraryFile in = read_library(cmd.seed);
  const auto model = make_model(in.metadata.model, in.metadata.model_options);
  const OcpDimensions d = model->dimensions();
  const int index = parameter_index(*model, cmd.parameter);
  const Method method = method_from_string(cmd.method);
  const PointRecord& start = in.point(cmd.point);
  const ShootingOptions shooting = run.tolerances.shooting();

  ContinuationConfig cfg;
  cfg.h0 = cmd.h0;
  cfg.h_min = cmd.h_min;
  cfg.h_max = cmd.h_max;
  cfg.newton_tol = run.tolerances.newton;
  cfg.max_steps = cmd.max_steps;
  cfg.sigma_end = from_display(cmd.parameter, cmd.target);

  auto progress = [&](const ProgressRecord& r) {
    if (!run.verbose) return;
    progress_line(err, {{"event", "step"},
                        {"step", r.step},
                        {cmd.parameter, to_display(cmd.parameter, r.sigma)},
                        {"h", r.h},
                        {"residual", r.residual_norm},
                        {"iterations", r.newton_iterations},
                        {"accepted", r.accepted}});
  };

  LibraryFile lib;
  lib.metadata = base_metadata(*model, in.metadata.model_options, run);
  lib.metadata.method = method;
  lib.metadata.parameter = cmd.parameter;
  lib.metadata.fixed_parameters = start.sigma;

  const auto started = Clock::now();
  GaitLibrary result;
  if (method == Method::kIndirect) {
    if (in.metadata.method != Method::kIndirect) {
      throw InputError("an indirect continuation needs an indirect seed or library");
    }
    const IndirectShooting shooter(*model, shooting);
    const int N = shooter.layout().size();
    Vector nu(N + 1);
    nu << start.indirect().flatten(), start.sigma(index);
    result = run_continuation(indirect_curve(shooter, start.sigma, index), nu, cfg, progress);
    for (const CurvePoint& c : result.points) {
      const IndirectDecision chi = IndirectDecision::unflatten(c.nu.head(N), d);
      const Vector sigma = with_parameter(start.sigma, index, c.nu(N));
      PointRecord p = PointRecord::from(chi, sigma);
      p.cost = shooter.evaluate(chi, sigma).cost;
      p.residual_norm = c.residual_norm;
      p.tangent = c.tangent;
      lib.points.push_back(p);
    }
  } else {
    const BasisSpec spec = in.metadata.method == Method::kDirect ? *in.metadata.basis : cmd.basis;
    lib.metadata.basis = spec;
    const DirectShooting direct(*model, spec.make(), shooting);
    DirectDecision chi0;
    if (in.metadata.method == Method::kIndirect) {
      const IndirectShooting shooter(*model, shooting);
      const DirectDecision guess = project_indirect(direct, shooter, start.indirect(), start.sigma);
      const NewtonResult solved = solve_direct(direct, guess, start.sigma, newton_options(run));
      if (!solved.converged) {
        fail(ErrorCode::kNonConvergence, "direct solve from the indirect point did not converge", solved.residual);
      }
      chi0 = DirectDecision::unflatten(solved.x, d, spec.n_xi);
    } else {
      chi0 = start.direct();
    }
    const int N = direct.layout().size();
    Vector nu(N + 1);
    nu << chi0.flatten(), start.sigma(index);
    result = run_continuation(direct_curve(direct, start.sigma, index), nu, cfg, progress);
    for (const CurvePoint& c : result.points) {
      const DirectDecision chi = DirectDecision::unflatten(c.nu.head(N), d, spec.n_xi);
      const Vector sigma = with_parameter(start.sigma, index, c.nu(N));
      PointRecord p = PointRecord::from(chi, sigma);
      p.cost = direct.evaluate(chi, sigma).cost;
      p.residual_norm = c.residual_norm;
      p.tangent = c.tangent;
      try {
        p.classification = to_string(classify_from_jacobian(direct.jacobian(chi, sigma).R, direct.layout()).kind);
      } catch (const GaitError& e) {
        if (e.code() != ErrorCode::kRegularityViolation) throw;
        p.classification = "irregular";
      }
      lib.points.push_back(p);
    }
  }
  lib.metadata.termination = to_string(result.termination);
  lib.metadata.message = result.message;
  lib.metadata.turning_points = result.turning_points;
  write_library(cmd.output, lib);

  const double final_sigma = lib.points.back().sigma(index);
  out << to_string(method) << " continuation in " << cmd.parameter << ": " << lib.points.size() << " points, "
      << result.turning_points.size() << " turning points, " << result.rejected_steps << " rejected steps, "
      << shortnum(elapsed_ms(started) / 1000.0, 3) << " s\n";
  for (int k : result.turning_points) {
    out << "  turning point near " << display_name(cmd.parameter) << " = "
        << shortnum(to_display(cmd.parameter, lib.points[k].sigma(index)), 8) << " (point " << k << ")\n";
  }
  out << "final " << display_name(cmd.parameter) << " = " << shortnum(to_display(cmd.parameter, final_sigma), 10)
      << ", T = " << shortnum(lib.points.back().T, 10) << ", cost = " << shortnum(lib.points.back().cost, 10)
      << " (" << to_string(result.termination) << ": " << result.message << ")\n"
      << "wrote " << cmd.output << "\n";
  if (result.termination != Termination::kReachedEnd) {
    progress_line(err, {{"error", to_string(result.termination)}, {"message", result.message}});
    return kNumericalFailure;
  }
  return kSuccess;
}

int cmd_compare(const CompareCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream& err) {
  const LibraryFile in = read_library(cmd.reference);
  if (in.metadata.method != Method::kIndirect) throw InputError("compare needs an indirect reference point");
  if (cmd.n_min > cmd.n_max) throw InputError("--n-xi-min exceeds --n-xi-max");
  const auto model = make_model(in.metadata.model, in.metadata.model_options);
  const OcpDimensions d = model->dimensions();
  const ShootingOptions shooting = run.tolerances.shooting();
  const PointRecord& ref = in.point(cmd.point);
  const Vector sigma = ref.sigma;
  const IndirectShooting shooter(*model, shooting);
  const IndirectDecision chi = IndirectDecision::unflatten(
      polish([&](const Vector& v) { return shooter.residual(IndirectDecision::unflatten(v, d), sigma); },
             [&](const Vector& v) {
               const JacobianResult j = shooter.jacobian(IndirectDecision::unflatten(v, d), sigma, {0});
               return Linearization{j.residual, j.R};
             },
             ref.indirect().flatten(), kPolishTolerance)
          .first,
      d);

  const auto t_ind = Clock::now();
  const double ind_cond = condition_number(shooter.jacobian(chi, sigma).R);
  const double ind_cost = shooter.evaluate(chi, sigma).cost;
  const double ind_ms = elapsed_ms(t_ind);

  struct Row {
    std::string basis;
    int n_xi = 0;
    std::optional<double> cond, cost, rel_error;
    std::string classification;
    double wall_ms = 0.0;
  };
  std::vector<Row> rows;
  for (int n = cmd.n_min; n <= cmd.n_max; ++n) {
    rows.push_back({"indirect", n, ind_cond, ind_cost, 0.0, "", ind_ms});
  }
  const BezierTime bezier_time = bezier_time_from_string(cmd.bezier_time);
  for (const std::string& name : cmd.bases) {
    const BasisKind kind = basis_from_string(name);
    for (int n = cmd.n_min; n <= cmd.n_max; ++n) {
      if (kind == BasisKind::kCubicBSpline && n < 4) continue;
      Row row{name, n, {}, {}, {}, "", 0.0};
      const auto t0 = Clock::now();
      try {
        const DirectShooting direct(*model, InputBasis(kind, n, bezier_time), shooting);
        const DirectDecision guess = project_indirect(direct, shooter, chi, sigma);
        const NewtonResult solved = solve_direct(direct, guess, sigma, newton_options(run));
        if (solved.converged) {
          const Vector x = polish(
              [&](const Vector& v) { return direct.residual(DirectDecision::unflatten(v, d, n), sigma); },
              [&](const Vector& v) {
                const JacobianResult j = direct.jacobian(DirectDecision::unflatten(v, d, n), sigma, {0});
                return Linearization{j.residual, j.R};
              },
              solved.x, kPolishTolerance).first;
          const DirectDecision opt = DirectDecision::unflatten(x, d, n);
          const JacobianResult J = direct.jacobian(opt, sigma);
          row.cond = condition_number(J.R);
          row.cost = direct.evaluate(opt, sigma).cost;
          row.rel_error = (*row.cost - ind_cost) / std::abs(ind_cost);
          row.classification = to_string(classify_from_jacobian(J.R, direct.layout()).kind);
        }
      } catch (const GaitError& e) {
        if (e.code() == ErrorCode::kContractViolation) throw;
      }
      row.wall_ms = elapsed_ms(t0);
      if (run.verbose) {
        progress_line(err, {{"event", "cell"},
                            {"basis", name},
                            {"n_xi", n},
                            {"converged", row.cost.has_value()},
                            {"wall_time_ms", row.wall_ms}});
      }
      rows.push_back(row);
    }
  }

  std::ofstream csv(cmd.csv);
  if (!csv) throw InputError("cannot open '" + cmd.csv + "' for writing");
  csv << "basis,n_xi,cond_number,cost,rel_cost_error_vs_indirect,classification,wall_time_ms\n";
  auto cell = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (const Row& r : rows) {
    csv << r.basis << "," << r.n_xi << "," << cell(r.cond) << "," << cell(r.cost) << "," << cell(r.rel_error) << ","
        << r.classification << "," << num(r.wall_ms) << "\n";
  }

  if (!cmd.plot_dir.empty()) {
    std::filesystem::create_directories(cmd.plot_dir);
    std::vector<std::string> series{"indirect"};
    series.insert(series.end(), cmd.bases.begin(), cmd.bases.end());
    for (const std::string& s : series) {
      std::vector<std::pair<double, double>> cond, err_xy, time;
      for (const Row& r : rows) {
        if (r.basis != s) continue;
        time.emplace_back(r.n_xi, r.wall_ms);
        if (r.cond) cond.emplace_back(r.n_xi, *r.cond);
        if (r.rel_error && s != "indirect") err_xy.emplace_back(r.n_xi, std::abs(*r.rel_error));
      }
      const std::filesystem::path dir(cmd.plot_dir);
      write_series(dir / ("cond_" + s + ".dat"), "n_xi cond_number", cond);
      write_series(dir / ("time_" + s + ".dat"), "n_xi wall_time_ms", time);
      if (s != "indirect") write_series(dir / ("relerr_" + s + ".dat"), "n_xi rel_cost_error", err_xy);
    }
  }

  out << std::left << std::setw(10) << "basis" << std::setw(6) << "n_xi" << std::setw(14) << "cond" << std::setw(18)
      << "cost" << std::setw(14) << "rel_error" << "class\n";
  for (const Row& r : rows) {
    auto show = [](const std::optional<double>& v) { return v ? shortnum(*v) : std::string("-"); };
    out << std::setw(10) << r.basis << std::setw(6) << r.n_xi << std::setw(14) << show(r.cond) << std::setw(18)
        << (r.cost ? shortnum(*r.cost, 12) : "-") << std::setw(14) << show(r.rel_error) << r.classification << "\n";
  }
  out << "wrote " << cmd.csv << "\n";
  return kSuccess;
}

int cmd_verify(const VerifyCommand& cmd, const RunSettings&, std::ostream& out, std::ostream&) {
  const LibraryFile lib = read_library(cmd.library);
  const LibraryMetadata& meta = lib.metadata;
  const auto model = make_model(meta.model, meta.model_options);
  const ShootingOptions shooting = meta.tolerances.shooting();
  const double tol = meta.tolerances.newton;
  const bool indirect = meta.method == Method::kIndirect;
  if (!indirect && !meta.basis) throw InputError("direct library without basis metadata");
  const int index = meta.parameter.empty() ? -1 : parameter_index(*model, meta.parameter);

  struct Check {
    std::string name;
    double limit = 0.0;
    double worst = 0.0;
    int failures = 0;
    int first_failure = -1;
    bool applicable = false;

    void record(int k, double value, bool ok) {
      applicable = true;
      worst = std::max(worst, value);
      if (!ok) {
        if (failures++ == 0) first_failure = k;
      }
    }
  };
  Check stored{"stored-residual", tol}, residual{"residual", tol}, cost{"cost", cmd.cost_tol},
      hamiltonian{"hamiltonian", cmd.hamiltonian_tol}, tangent_norm{"tangent-norm", 1e-8},
      ordering{"arclength-order", 0.0};

  const IndirectShooting shooter(*model, shooting);
  std::optional<DirectShooting> direct;
  if (!indirect) direct.emplace(*model, meta.basis->make(), shooting);

  Vector prev_nu, prev_tangent;
  for (int k = 0; k < static_cast<int>(lib.points.size()); ++k) {
    const PointRecord& p = lib.points[k];
    stored.record(k, p.residual_norm, p.residual_norm <= tol);

    double c = 0.0;
    Vector flat;
    try {
      if (indirect) {
        const IndirectDecision chi = p.indirect();
        const IndirectEvaluation ev = shooter.evaluate(chi, p.sigma);
        const double r = ev.residual.lpNorm<Eigen::Infinity>();
        residual.record(k, r, r <= tol);
        c = ev.cost;
        const IndirectTrajectory traj = shooter.trajectory(chi, p.sigma);
        const double H0 = traj.hamiltonian_at(0.0);
        double drift = 0.0;
        for (int j = 1; j <= cmd.hamiltonian_samples; ++j) {
          drift = std::max(drift, std::abs(traj.hamiltonian_at(chi.T * j / cmd.hamiltonian_samples) - H0));
        }
        hamiltonian.record(k, drift, drift <= cmd.hamiltonian_tol);
        flat = chi.flatten();
      } else {
        const DirectDecision chi = p.direct();
        const DirectEvaluation ev = direct->evaluate(chi, p.sigma);
        const double r = ev.residual.lpNorm<Eigen::Infinity>();
        residual.record(k, r, r <= tol);
        c = ev.cost;
        flat = chi.flatten();
      }
    } catch (const GaitError& e) {
      if (e.code() == ErrorCode::kContractViolation) throw InputError(e.what());
      residual.record(k, std::numeric_limits<double>::infinity(), false);
      continue;
    }
    const double dc = std::abs(c - p.cost);
    const double rel = dc == 0.0 ? 0.0 : dc / std::max(std::abs(p.cost), 1e-300);
    cost.record(k, rel, rel <= cmd.cost_tol);

    if (p.tangent.size() > 0) {
      const double dn = std::abs(p.tangent.norm() - 1.0);
      tangent_norm.record(k, dn, dn <= 1e-8);
      if (index >= 0) {
        Vector nu(flat.size() + 1);
        nu << flat, p.sigma(index);
        if (prev_nu.size() == nu.size()) {
          const double dot = prev_tangent.size() == p.tangent.size() ? prev_tangent.dot(p.tangent) : 1.0;
          const bool ok = (nu - prev_nu).norm() > 0.0 && dot > 0.0;
          ordering.record(k, ok ? 0.0 : 1.0, ok);
        }
        prev_nu = nu;
        prev_tangent = p.tangent;
      }
    }
  }

  bool all_ok = true;
  out << "verify " << cmd.library << " (" << lib.points.size() << " points, " << to_string(meta.method) << ")\n";
  for (const Check* c : {&stored, &residual, &cost, &hamiltonian, &tangent_norm, &ordering}) {
    if (!c->applicable) continue;
    const bool ok = c->failures == 0;
    all_ok = all_ok && ok;
    out << (ok ? "PASS " : "FAIL ") << std::left << std::setw(16) << c->name << " worst " << shortnum(c->worst, 3)
        << " limit " << shortnum(c->limit, 3);
    if (!ok) out << " (" << c->failures << " points fail, first at point " << c->first_failure << ")";
    out << "\n";
  }
  out << (all_ok ? "all checks passed" : "verification failed") << "\n";
  return all_ok ? kSuccess : kNumericalFailure;
}

int cmd_export(const ExportCommand& cmd, const RunSettings&, std::ostream& out, std::ostream&) {
  const LibraryFile lib = read_library(cmd.library);
  const LibraryMetadata& meta = lib.metadata;
  const std::string param = meta.parameter.empty() ? meta.parameter_names.at(0) : meta.parameter;
  const auto it = std::find(meta.parameter_names.begin(), meta.parameter_names.end(), param);
  if (it == meta.parameter_names.end()) throw InputError("library parameter '" + param + "' is not declared");
  const int index = static_cast<int>(it - meta.parameter_names.begin());
  const bool indirect = meta.method == Method::kIndirect;
  const std::filesystem::path dir(cmd.out_dir);
  std::filesystem::create_directories(dir);
  const std::string xname = display_name(param);

  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
  auto add = [&](const std::string& name, auto&& value) {
    std::vector<std::pair<double, double>> xy;
    for (const PointRecord& p : lib.points) xy.emplace_back(to_display(param, p.sigma(index)), value(p));
    series.emplace_back(name, std::move(xy));
  };
  add("T", [](const PointRecord& p) { return p.T; });
  add("cost", [](const PointRecord& p) { return p.cost; });
  const int n_x = static_cast<int>(lib.points.front().x0.size());
  for (int i = 0; i < n_x; ++i) add("x0_" + std::to_string(i), [i](const PointRecord& p) { return p.x0(i); });
  if (indirect) {
    const int n_u = static_cast<int>(lib.points.front().u0.size());
    for (int i = 0; i < n_u; ++i) {
      add(n_u == 1 ? std::string("u0") : "u0_" + std::to_string(i), [i](const PointRecord& p) { return p.u0(i); });
    }
    add("q", [](const PointRecord& p) { return p.q; });
  }

  for (const auto& [name, xy] : series) {
    const std::filesystem::path path = dir / (param + "_" + name + ".dat");
    write_series(path, xname + " " + name, xy);
    out << "wrote " << path.string() << "\n";
  }

  const std::filesystem::path csv_path = dir / "points.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw InputError("cannot open '" + csv_path.string() + "' for writing");
  csv << "index";
  for (const std::string& n : meta.parameter_names) csv << "," << display_name(n);
  csv << ",T,cost,residual_norm,turning_point,classification\n";
  for (int k = 0; k < static_cast<int>(lib.points.size()); ++k) {
    const PointRecord& p = lib.points[k];
    const bool turning =
        std::find(meta.turning_points.begin(), meta.turning_points.end(), k) != meta.turning_points.end();
    csv << k;
    for (int i = 0; i < static_cast<int>(p.sigma.size()); ++i) {
      csv << "," << num(to_display(meta.parameter_names.at(i), p.sigma(i)));
    }
    csv << "," << num(p.T) << "," << num(p.cost) << "," << num(p.residual_norm) << "," << (turning ? 1 : 0) << ","
        << p.classification << "\n";
  }
  out << "wrote " << csv_path.string() << "\n";
  return kSuccess;
}

}  // namespace gaitforge::cli
