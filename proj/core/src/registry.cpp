#include "gaitforge/registry.hpp"

#include "gaitforge/compass_gait.hpp"
#include "gaitforge/error.hpp"

namespace gaitforge {

namespace {

std::unique_ptr<ParameterizedOcp> make_compass_gait(const ModelOptions& options) {
  compass_gait::WalkerParams p;
  for (const auto& [key, value] : options) {
    if (key == "mass_matrix") {
      p.convention = compass_gait::convention_from_string(value);
    } else {
      fail(ErrorCode::kContractViolation, "compass-gait has no option '" + key + "'");
    }
  }
  return std::make_unique<compass_gait::CompassGait>(p);
}

}  // namespace

std::unique_ptr<ParameterizedOcp> make_model(const std::string& name, const ModelOptions& options) {
  if (name == "compass-gait") return make_compass_gait(options);
  std::string known;
  for (const std::string& m : registered_models()) known += " " + m;
  fail(ErrorCode::kContractViolation, "unknown model '" + name + "'; registered:" + known);
}

std::vector<std::string> registered_models() { return {"compass-gait"}; }

}  // namespace gaitforge
