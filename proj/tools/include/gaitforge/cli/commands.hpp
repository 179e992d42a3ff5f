#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gaitforge/cli/library_file.hpp"

namespace gaitforge::cli {

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kUsageError = 2 };

struct RunSettings {
  int threads = 0;  // 0 = available parallelism
  bool verbose = false;
  ToleranceSettings tolerances;
};

// Angle-valued parameters are shown in degrees and stored in radians.
bool is_angle(const std::string& parameter);
double to_display(const std::string& parameter, double internal);
double from_display(const std::string& parameter, double shown);

struct PassiveCommand {
  std::string model;
  ModelOptions model_options;
  double v_avg = 0.1;
  std::string branch = "long";
  std::optional<double> T_guess;
  std::optional<double> gamma_guess;  // degrees
  std::vector<double> x0_guess;
  std::string output;
};

struct ContinueCommand {
  std::string method = "indirect";
  std::string seed;
  int point = -1;
  std::string parameter;
  double target = 0.0;  // display units
  BasisSpec basis;
  double h0 = 0.01;
  double h_min = 1e-6;
  double h_max = 0.1;
  int max_steps = 2000;
  std::string output;
};

struct CompareCommand {
  std::string reference;
  int point = -1;
  int n_min = 2;
  int n_max = 12;
  std::vector<std::string> bases{"bezier", "bspline"};
  std::string bezier_time = "raw";
  std::string csv;
  std::string plot_dir;
};

struct VerifyCommand {
  std::string library;
  double hamiltonian_tol = 1e-6;
  double cost_tol = 1e-10;
  int hamiltonian_samples = 64;
};

struct ExportCommand {
  std::string library;
  std::string out_dir;
};

int cmd_passive(const PassiveCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream& err);
int cmd_continue(const ContinueCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream& err);
int cmd_export(const ExportCommand& cmd, const RunSettings& run, std::ostream& out, std::ostream& err);

// Parses argv and dispatches. Never throws; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gaitforge::cli
