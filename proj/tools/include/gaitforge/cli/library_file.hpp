#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitforge/direct.hpp"
#include "gaitforge/indirect.hpp"
#include "gaitforge/registry.hpp"

namespace gaitforge::cli {

inline constexpr const char* kSchema = "gaitforge/1";

// Unreadable or malformed input files. Reported as usage errors.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { kIndirect, kDirect };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct ToleranceSettings {
  double newton = 1e-8;
  double rel = 1e-9;
  double abs = 1e-10;
  double fd = 1e-9;

  ShootingOptions shooting() const;
};

struct BasisSpec {
  BasisKind kind = BasisKind::kCubicBSpline;
  int n_xi = 4;
  BezierTime bezier_time = BezierTime::kRaw;

  InputBasis make() const { return InputBasis(kind, n_xi, bezier_time); }
};

struct LibraryMetadata {
  std::string kind = "library";  // "seed" or "library"
  std::string model;
  ModelOptions model_options;
  Method method = Method::kIndirect;
  std::optional<BasisSpec> basis;
  std::vector<std::string> parameter_names;
  std::string parameter;    // continuation parameter; empty for seeds
  Vector fixed_parameters;  // parameter values at the first point
  ToleranceSettings tolerances;
  std::string artifact_version;
  std::string timestamp;
  std::string termination;
  std::string message;
  std::vector<int> turning_points;
};

// One gait. Indirect records fill (p0, q, u0, lambda), direct records fill
// (xi, lambda_hat, classification).
struct PointRecord {
  Vector sigma;
  double T = 0.0;
  Vector x0;
  Vector p0;
  double q = 0.0;
  Vector u0;
  Vector lambda;
  Vector xi;
  Vector lambda_hat;
  double cost = 0.0;
  double residual_norm = 0.0;
  Vector tangent;
  std::string classification;

  IndirectDecision indirect() const;
  DirectDecision direct() const;
  static PointRecord from(const IndirectDecision& chi, const Vector& sigma);
  static PointRecord from(const DirectDecision& chi, const Vector& sigma);
};

struct PassiveRecord {
  double T = 0.0;
  Vector x0;
  Vector sigma;
  std::string free_parameter;
  std::string branch;
  double residual_norm = 0.0;
  int iterations = 0;
};

struct SeedRecord {
  PassiveRecord passive;
  Vector residual;
  double costate_mismatch = 0.0;
  int lambda_rank = 0;
  int stack_depth = 0;
  std::vector<int> selected_rows;
};

struct LibraryFile {
  LibraryMetadata metadata;
  std::vector<PointRecord> points;
  std::optional<SeedRecord> seed;

  // Negative indices count from the back.
  const PointRecord& point(int index) const;
};

std::string dump(const LibraryFile& file);
LibraryFile parse(const std::string& text);

void write_library(const std::string& path, const LibraryFile& file);
LibraryFile read_library(const std::string& path);

std::string utc_timestamp();

}  // namespace gaitforge::cli
