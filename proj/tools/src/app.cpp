#include <ostream>

#include "CLI11.hpp"
#include "gaitforge/cli/commands.hpp"
#include "gaitforge/error.hpp"
#include "gaitforge/parallel.hpp"
#include "json.hpp"

#ifndef GAITFORGE_VERSION
#define GAITFORGE_VERSION "unknown"
#endif

namespace gaitforge::cli {

namespace {

void report(std::ostream& err, const std::string& kind, const std::string& message,
            const std::vector<double>& payload = {}) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (!payload.empty()) j["payload"] = payload;
  err << j.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Libraries of locally optimal periodic gaits for hybrid systems", "gaitforge"};
  app.set_version_flag("--version", GAITFORGE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  RunSettings run;
  app.add_option("--threads", run.threads, "Worker threads for Jacobian columns (0 = available parallelism)")
      ->envname("GAITFORGE_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", run.verbose, "JSON-lines progress on stderr")->envname("GAITFORGE_VERBOSE");
  app.add_option("--newton-tol", run.tolerances.newton, "Newton residual tolerance (inf-norm)")
      ->envname("GAITFORGE_NEWTON_TOL")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--rel-tol", run.tolerances.rel, "Integrator relative tolerance")
      ->envname("GAITFORGE_REL_TOL")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--abs-tol", run.tolerances.abs, "Integrator absolute tolerance")
      ->envname("GAITFORGE_ABS_TOL")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--fd-step", run.tolerances.fd, "Forward-difference step for Jacobians")
      ->envname("GAITFORGE_FD_STEP")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  PassiveCommand passive;
  std::string mass_matrix;
  auto* p = app.add_subcommand("passive", "Find a passive gait and reconstruct an indirect seed from it");
  p->add_option("--model", passive.model, "Registered model name")->required();
  p->add_option("--mass-matrix", mass_matrix, "Compass-gait mass matrix (standard|as-printed)")
      ->envname("GAITFORGE_MASS_MATRIX")
      ->check(CLI::IsMember({"standard", "as-printed"}));
  p->add_option("--v-avg", passive.v_avg, "Average walking speed")->capture_default_str();
  p->add_option("--branch", passive.branch, "Passive branch (short|long)")
      ->check(CLI::IsMember({"short", "long"}))
      ->capture_default_str();
  p->add_option("--t-guess", passive.T_guess, "Period guess; replaces the built-in guess");
  p->add_option("--gamma-guess", passive.gamma_guess, "Slope guess in degrees");
  p->add_option("--x0-guess", passive.x0_guess, "Initial state guess, comma separated")->delimiter(',');
  p->add_option("-o,--output", passive.output, "Seed file to write")->required();

  ContinueCommand cont;
  std::string basis_kind = "bspline", bezier_time = "raw";
  auto* c = app.add_subcommand("continue", "Trace a gait library by pseudo-arclength continuation");
  c->add_option("--method", cont.method, "indirect|direct")
      ->check(CLI::IsMember({"indirect", "direct"}))
      ->capture_default_str();
  c->add_option("--seed", cont.seed, "Seed or library file to start from")->required();
  c->add_option("--point", cont.point, "Start point in the file (negative counts from the end)")
      ->capture_default_str();
  c->add_option("--param", cont.parameter, "Continuation parameter")->required();
  c->add_option("--to", cont.target, "Target value (degrees for angles)")->required();
  c->add_option("--basis", basis_kind, "Direct input basis (bezier|bspline)")
      ->check(CLI::IsMember({"bezier", "bspline"}))
      ->capture_default_str();
  c->add_option("--n-xi", cont.basis.n_xi, "Direct basis size")->check(CLI::PositiveNumber)->capture_default_str();
  c->add_option("--bezier-time", bezier_time, "Bezier argument (raw|normalized)")
      ->check(CLI::IsMember({"raw", "normalized"}))
      ->capture_default_str();
  c->add_option("--h0", cont.h0, "Initial arclength step")->capture_default_str();
  c->add_option("--h-min", cont.h_min, "Smallest arclength step")->capture_default_str();
  c->add_option("--h-max", cont.h_max, "Largest arclength step")->capture_default_str();
  c->add_option("--max-steps", cont.max_steps, "Step limit")->capture_default_str();
  c->add_option("-o,--output", cont.output, "Library file to write")->required();

  CompareCommand cmp;
  auto* m = app.add_subcommand("compare", "Compare direct transcriptions against an indirect reference");
  m->add_option("--reference", cmp.reference, "Indirect seed or library holding the reference gait")->required();
  m->add_option("--point", cmp.point, "Reference point in the file")->capture_default_str();
  m->add_option("--n-xi-min", cmp.n_min, "Smallest basis size")->check(CLI::PositiveNumber)->capture_default_str();
  m->add_option("--n-xi-max", cmp.n_max, "Largest basis size")->check(CLI::PositiveNumber)->capture_default_str();
  m->add_option("--bases", cmp.bases, "Bases to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"bezier", "bspline"}))
      ->capture_default_str();
  m->add_option("--bezier-time", cmp.bezier_time, "Bezier argument (raw|normalized)")
      ->check(CLI::IsMember({"raw", "normalized"}))
      ->capture_default_str();
  m->add_option("--csv", cmp.csv, "CSV table to write")->required();
  m->add_option("--plot-dir", cmp.plot_dir, "Directory for two-column plot data");

  VerifyCommand ver;
  auto* v = app.add_subcommand("verify", "Re-evaluate a library and check its invariants");
  v->add_option("library", ver.library, "Library or seed file")->required();
  v->add_option("--hamiltonian-tol", ver.hamiltonian_tol, "Allowed Hamiltonian drift")->capture_default_str();
  v->add_option("--cost-tol", ver.cost_tol, "Allowed relative cost mismatch")->capture_default_str();

  ExportCommand exp;
  auto* e = app.add_subcommand("export", "Write plot-ready data for a library");
  e->add_option("library", exp.library, "Library or seed file")->required();
  e->add_option("--out-dir", exp.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    set_worker_threads(run.threads);
    if (!mass_matrix.empty()) passive.model_options["mass_matrix"] = mass_matrix;
    cont.basis.kind = basis_from_string(basis_kind);
    cont.basis.bezier_time = bezier_time_from_string(bezier_time);
    if (p->parsed()) return cmd_passive(passive, run, out, err);
    if (c->parsed()) return cmd_continue(cont, run, out, err);
    if (m->parsed()) return cmd_compare(cmp, run, out, err);
    if (v->parsed()) return cmd_verify(ver, run, out, err);
    if (e->parsed()) return cmd_export(exp, run, out, err);
    return kUsageError;
  } catch (const InputError& ex) {
    report(err, "usage", ex.what());
    return kUsageError;
  } catch (const GaitError& ex) {
    const Vector& pl = ex.payload();
    report(err, to_string(ex.code()), ex.what(), std::vector<double>(pl.data(), pl.data() + pl.size()));
    return ex.code() == ErrorCode::kContractViolation ? kUsageError : kNumericalFailure;
  } catch (const std::exception& ex) {
    report(err, "internal", ex.what());
    return kNumericalFailure;
  }
}

}  // namespace gaitforge::cli
