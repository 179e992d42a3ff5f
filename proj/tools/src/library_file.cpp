#include "gaitforge/cli/library_file.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include "gaitforge/error.hpp"
#include "json.hpp"

namespace gaitforge::cli {

using nlohmann::json;

std::string to_string(Method m) { return m == Method::kIndirect ? "indirect" : "direct"; }

Method method_from_string(const std::string& s) {
  if (s == "indirect") return Method::kIndirect;
  if (s == "direct") return Method::kDirect;
  throw InputError("unknown method '" + s + "' (expected indirect or direct)");
}

ShootingOptions ToleranceSettings::shooting() const {
  ShootingOptions o;
  o.tolerances.rel_tol = rel;
  o.tolerances.abs_tol = abs;
  o.fd.step = fd;
  return o;
}

IndirectDecision PointRecord::indirect() const {
  IndirectDecision chi;
  chi.T = T;
  chi.x0 = x0;
  chi.p0 = p0;
  chi.q = q;
  chi.u0 = u0;
  chi.lambda = lambda;
  return chi;
}

DirectDecision PointRecord::direct() const {
  DirectDecision chi;
  chi.T = T;
  chi.x0 = x0;
  chi.xi = xi;
  chi.lambda_hat = lambda_hat;
  return chi;
}

PointRecord PointRecord::from(const IndirectDecision& chi, const Vector& sigma) {
  PointRecord r;
  r.sigma = sigma;
  r.T = chi.T;
  r.x0 = chi.x0;
  r.p0 = chi.p0;
  r.q = chi.q;
  r.u0 = chi.u0;
  r.lambda = chi.lambda;
  return r;
}

PointRecord PointRecord::from(const DirectDecision& chi, const Vector& sigma) {
  PointRecord r;
  r.sigma = sigma;
  r.T = chi.T;
  r.x0 = chi.x0;
  r.xi = chi.xi;
  r.lambda_hat = chi.lambda_hat;
  return r;
}

const PointRecord& LibraryFile::point(int index) const {
  const int n = static_cast<int>(points.size());
  const int k = index < 0 ? n + index : index;
  if (k < 0 || k >= n) {
    throw InputError("point index " + std::to_string(index) + " out of range (library has " +
                     std::to_string(n) + " points)");
  }
  return points[k];
}

namespace {

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec(const json& j) {
  const auto values = j.get<std::vector<double>>();
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

json point_json(const PointRecord& p, Method m) {
  json j;
  j["sigma"] = vec(p.sigma);
  j["T"] = p.T;
  j["x0"] = vec(p.x0);
  if (m == Method::kIndirect) {
    j["p0"] = vec(p.p0);
    j["q"] = p.q;
    j["u0"] = vec(p.u0);
    j["lambda"] = vec(p.lambda);
  } else {
    j["xi"] = vec(p.xi);
    j["lambda_hat"] = vec(p.lambda_hat);
  }
  j["cost"] = p.cost;
  j["residual_norm"] = p.residual_norm;
  j["tangent"] = vec(p.tangent);
  if (!p.classification.empty()) j["classification"] = p.classification;
  return j;
}

PointRecord point_from(const json& j, Method m) {
  PointRecord p;
  p.sigma = vec(j.at("sigma"));
  p.T = j.at("T").get<double>();
  p.x0 = vec(j.at("x0"));
  if (m == Method::kIndirect) {
    p.p0 = vec(j.at("p0"));
    p.q = j.at("q").get<double>();
    p.u0 = vec(j.at("u0"));
    p.lambda = vec(j.at("lambda"));
  } else {
    p.xi = vec(j.at("xi"));
    p.lambda_hat = vec(j.at("lambda_hat"));
  }
  p.cost = j.at("cost").get<double>();
  p.residual_norm = j.at("residual_norm").get<double>();
  p.tangent = vec(j.value("tangent", json::array()));
  p.classification = j.value("classification", std::string());
  return p;
}

json metadata_json(const LibraryMetadata& m) {
  json j;
  j["kind"] = m.kind;
  j["model"] = m.model;
  j["model_options"] = m.model_options;
  j["method"] = to_string(m.method);
  if (m.basis) {
    j["basis"] = {{"kind", to_string(m.basis->kind)},
                  {"n_xi", m.basis->n_xi},
                  {"bezier_time", to_string(m.basis->bezier_time)}};
  }
  j["parameter_names"] = m.parameter_names;
  j["parameter"] = m.parameter;
  j["fixed_parameters"] = vec(m.fixed_parameters);
  j["tolerances"] = {{"newton", m.tolerances.newton},
                     {"rel", m.tolerances.rel},
                     {"abs", m.tolerances.abs},
                     {"fd", m.tolerances.fd}};
  j["artifact_version"] = m.artifact_version;
  j["timestamp"] = m.timestamp;
  j["termination"] = m.termination;
  j["message"] = m.message;
  j["turning_points"] = m.turning_points;
  return j;
}

LibraryMetadata metadata_from(const json& j) {
  LibraryMetadata m;
  m.kind = j.at("kind").get<std::string>();
  m.model = j.at("model").get<std::string>();
  m.model_options = j.value("model_options", ModelOptions{});
  m.method = method_from_string(j.at("method").get<std::string>());
  if (j.contains("basis")) {
    const json& b = j["basis"];
    BasisSpec spec;
    spec.kind = basis_from_string(b.at("kind").get<std::string>());
    spec.n_xi = b.at("n_xi").get<int>();
    spec.bezier_time = bezier_time_from_string(b.value("bezier_time", std::string("raw")));
    m.basis = spec;
  }
  m.parameter_names = j.at("parameter_names").get<std::vector<std::string>>();
  m.parameter = j.value("parameter", std::string());
  m.fixed_parameters = vec(j.at("fixed_parameters"));
  const json& t = j.at("tolerances");
  m.tolerances.newton = t.at("newton").get<double>();
  m.tolerances.rel = t.at("rel").get<double>();
  m.tolerances.abs = t.at("abs").get<double>();
  m.tolerances.fd = t.at("fd").get<double>();
  m.artifact_version = j.value("artifact_version", std::string());
  m.timestamp = j.value("timestamp", std::string());
  m.termination = j.value("termination", std::string());
  m.message = j.value("message", std::string());
  m.turning_points = j.value("turning_points", std::vector<int>{});
  return m;
}

json seed_json(const SeedRecord& s) {
  const PassiveRecord& p = s.passive;
  json j;
  j["passive"] = {{"T", p.T},
                  {"x0", vec(p.x0)},
                  {"sigma", vec(p.sigma)},
                  {"free_parameter", p.free_parameter},
                  {"branch", p.branch},
                  {"residual_norm", p.residual_norm},
                  {"iterations", p.iterations}};
  j["diagnostics"] = {{"residual", vec(s.residual)},
                      {"costate_mismatch", s.costate_mismatch},
                      {"lambda_rank", s.lambda_rank},
                      {"stack_depth", s.stack_depth},
                      {"selected_rows", s.selected_rows}};
  return j;
}

SeedRecord seed_from(const json& j) {
  SeedRecord s;
  const json& p = j.at("passive");
  s.passive.T = p.at("T").get<double>();
  s.passive.x0 = vec(p.at("x0"));
  s.passive.sigma = vec(p.at("sigma"));
  s.passive.free_parameter = p.at("free_parameter").get<std::string>();
  s.passive.branch = p.value("branch", std::string());
  s.passive.residual_norm = p.at("residual_norm").get<double>();
  s.passive.iterations = p.value("iterations", 0);
  const json& d = j.at("diagnostics");
  s.residual = vec(d.at("residual"));
  s.costate_mismatch = d.at("costate_mismatch").get<double>();
  s.lambda_rank = d.at("lambda_rank").get<int>();
  s.stack_depth = d.at("stack_depth").get<int>();
  s.selected_rows = d.at("selected_rows").get<std::vector<int>>();
  return s;
}

}  // namespace

std::string dump(const LibraryFile& file) {
  json j;
  j["schema"] = kSchema;
  j["metadata"] = metadata_json(file.metadata);
  if (file.seed) j["seed"] = seed_json(*file.seed);
  json pts = json::array();
  for (const PointRecord& p : file.points) pts.push_back(point_json(p, file.metadata.method));
  j["points"] = std::move(pts);
  return j.dump(2) + "\n";
}

LibraryFile parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(e.what());
  }
  try {
    const std::string schema = j.at("schema").get<std::string>();
    if (schema != kSchema) {
      throw InputError("unsupported schema '" + schema + "' (expected " + kSchema + ")");
    }
    LibraryFile file;
    file.metadata = metadata_from(j.at("metadata"));
    if (j.contains("seed")) file.seed = seed_from(j["seed"]);
    for (const json& p : j.at("points")) file.points.push_back(point_from(p, file.metadata.method));
    if (file.points.empty()) throw InputError("library has no points");
    return file;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed library: ") + e.what());
  } catch (const GaitError& e) {
    throw InputError(std::string("malformed library: ") + e.what());
  }
}

void write_library(const std::string& path, const LibraryFile& file) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << dump(file);
  if (!out) throw InputError("failed writing '" + path + "'");
}

LibraryFile read_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace gaitforge::cli
