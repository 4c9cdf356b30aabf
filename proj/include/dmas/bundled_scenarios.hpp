#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dmas {

struct BundledScenario {
  std::string name;
  std::string description;
  nlohmann::json doc;
};

const std::vector<BundledScenario>& bundled_scenarios();

std::optional<nlohmann::json> find_bundled(const std::string& name);

}  // namespace dmas
