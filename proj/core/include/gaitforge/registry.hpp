#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gaitforge/ocp.hpp"

namespace gaitforge {

using ModelOptions = std::map<std::string, std::string>;

// Builds a registered model by name. Unknown names or options throw a
// contract violation listing what is available.
std::unique_ptr<ParameterizedOcp> make_model(const std::string& name, const ModelOptions& options = {});
std::vector<std::string> registered_models();

}  // namespace gaitforge
