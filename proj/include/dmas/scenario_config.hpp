#pragma once

#include "dmas/adversary.hpp"
#include "dmas/control_design.hpp"
#include "dmas/graph.hpp"
#include "dmas/resilient.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dmas {

enum class ControllerKind { Baseline, Resilient };
const char* to_string(ControllerKind k);

struct ModelPreset {
  std::string name;
  Mat A;
  Mat B;
  std::optional<Mat> K0;  ///< leader gain printed alongside the model, if any
};

/// Named agent models: "auv_diving", "single_integrator", "rotation2d".
ModelPreset model_preset(const std::string& name);
std::vector<std::string> model_preset_names();

struct ScenarioConfig {
  std::string name;
  std::string description;
  std::string model_name;  ///< preset name or "custom"
  Mat A;
  Mat B;
  std::size_t n_agents = 0;
  std::vector<Edge> edges;
  std::int64_t horizon = 0;
  Vec x0;
  std::optional<std::uint64_t> seed;
  ControllerKind controller = ControllerKind::Baseline;
  DesignRequest design;
  double zeta = 1.0;
  std::vector<AttackSpec> attacks;
  std::int64_t compensator_start = 0;
  std::optional<Vec> predictor_init;
  std::optional<LeaderConfig> leader;
  double divergence_threshold = 1e9;
};

struct ParseOptions {
  std::optional<std::int64_t> horizon;
  std::optional<std::uint64_t> seed;
};

/// Field paths in ConfigError use JSON-pointer style, e.g. "/attacks/0/signal/omega".
ScenarioConfig parse_scenario(const nlohmann::json& doc, const ParseOptions& opts = {});
ScenarioConfig load_scenario_file(const std::filesystem::path& path, const ParseOptions& opts = {});

DirectedGraph build_graph(const ScenarioConfig& cfg);

}  // namespace dmas
