#include "dmas/bundled_scenarios.hpp"

namespace dmas {

namespace {

// Agents are 0-indexed. Edges are [from, to]: agent "to" receives from "from".
constexpr const char* kFourAgentGraph = R"({"agents": 4, "edges": [[1, 0], [0, 1], [1, 2], [0, 3]]})";
constexpr const char* kAuvGraph = R"({"agents": 6, "edges": [[0, 2], [2, 1], [2, 3], [3, 4], [3, 5], [4, 5]]})";
constexpr const char* kRingGraph = R"({"agents": 5, "edges": [[1, 0], [1, 2], [2, 3], [2, 4], [3, 4]]})";

nlohmann::json base(const char* name, const char* model, const char* graph, int horizon) {
  nlohmann::json j;
  j["name"] = name;
  j["model"] = model;
  j["graph"] = nlohmann::json::parse(graph);
  j["horizon"] = horizon;
  return j;
}

nlohmann::json four_agent(const char* name) {
  auto j = base(name, "single_integrator", kFourAgentGraph, 2000);
  j["x0"] = {2, 4, 9, -3};
  j["design"] = {{"K", 1.0}, {"c", 1.0}};
  return j;
}

nlohmann::json auv(const char* name) {
  auto j = base(name, "auv_diving", kAuvGraph, 600);
  j["x0"] = {{"random", 1.0}, {"seed", 7}};
  j["leader"] = nlohmann::json::parse(R"({"agent": 0, "reference": {"type": "sin", "amplitude": [1, 1], "omega": 0.05}})");
  return j;
}

nlohmann::json rotation(const char* name) {
  auto j = base(name, "rotation2d", kRingGraph, 1000);
  j["x0"] = {{"random", 1.0}, {"seed", 11}};
  return j;
}

nlohmann::json actuator(int agent, const nlohmann::json& signal, int start = 0) {
  return {{"agent", agent}, {"channel", "actuator"}, {"start", start}, {"signal", signal}};
}

std::vector<BundledScenario> build() {
  std::vector<BundledScenario> out;
  auto add = [&](nlohmann::json doc, const char* description) {
    doc["description"] = description;
    out.push_back({doc["name"].get<std::string>(), description, std::move(doc)});
  };
  const auto unit = nlohmann::json::parse(R"({"type": "constant", "value": 1})");

  add(four_agent("four_agent_consensus"), "Four single integrators, no attack; converges to the mean of agents 0 and 1.");
  {
    auto j = four_agent("four_agent_root_attack");
    j["attacks"] = {actuator(0, unit)};
    add(j, "Constant actuator attack on root agent 0; the network drifts without bound.");
  }
  {
    auto j = four_agent("four_agent_nonroot_attack");
    j["attacks"] = {actuator(2, unit)};
    add(j, "Constant actuator attack on non-root agent 2; bounded deviation.");
  }
  {
    auto j = four_agent("four_agent_nonroot_attack_resilient");
    j["attacks"] = {actuator(2, unit)};
    j["controller"] = "resilient";
    add(j, "Same attack on agent 2 with the predictor-based compensator.");
  }
  {
    auto j = four_agent("four_agent_sensor_attack_resilient");
    j["attacks"] = {{{"agent", 2}, {"channel", "sensor"}, {"signal", unit}}};
    j["controller"] = "resilient";
    add(j, "Constant sensor bias on agent 2 with the compensator.");
  }
  {
    auto j = base("five_agent_nonroot_constant", "single_integrator", kRingGraph, 2000);
    j["x0"] = {1, -2, 3, 0.5, -1};
    j["attacks"] = {actuator(2, unit)};
    add(j, "Five single integrators; constant attack on non-root agent 2 reaches agents 3 and 4 only.");
  }

  add(auv("auv_healthy"), "AUV diving subsystem, leader 0 tracking a sinusoidal command, no attack.");
  const auto sin10 = nlohmann::json::parse(R"({"type": "sin", "amplitude": [10, 10], "omega": 1})");
  const auto const5 = nlohmann::json::parse(R"({"type": "constant", "value": [5, 5]})");
  for (const bool res : {false, true}) {
    auto j = auv(res ? "auv_sin_agent3_resilient" : "auv_sin_agent3_baseline");
    j["attacks"] = {actuator(3, sin10, 61)};
    if (res) {
      j["controller"] = "resilient";
      j["compensator_start"] = 61;
    }
    add(j, res ? "10 sin(k) on both inputs of AUV 3 from step 61, compensator on from step 61."
               : "10 sin(k) on both inputs of AUV 3 from step 61, baseline controller.");
  }
  for (const bool res : {false, true}) {
    auto j = auv(res ? "auv_const_agent2_resilient" : "auv_const_agent2_baseline");
    j["attacks"] = {actuator(2, const5, 61)};
    if (res) {
      j["controller"] = "resilient";
      j["compensator_start"] = 61;
    }
    add(j, res ? "Constant [5, 5] on AUV 2 from step 61, compensator on from step 61."
               : "Constant [5, 5] on AUV 2 from step 61, baseline controller.");
  }

  const auto imp = nlohmann::json::parse(R"({"type": "sin", "amplitude": 1, "omega": "pi/2"})");
  for (const bool res : {false, true}) {
    auto j = rotation(res ? "rotation_root_imp_resilient" : "rotation_root_imp_baseline");
    j["attacks"] = {actuator(1, imp)};
    if (res) j["controller"] = "resilient";
    add(j, "Rotation agents; sin(pi k / 2) matches the plant modes and hits root agent 1.");
  }
  for (const bool res : {false, true}) {
    auto j = rotation(res ? "rotation_nonroot_imp_resilient" : "rotation_nonroot_imp_baseline");
    j["attacks"] = {actuator(2, imp)};
    if (res) j["controller"] = "resilient";
    add(j, "Rotation agents; sin(pi k / 2) on non-root agent 2.");
  }
  {
    auto j = rotation("rotation_root_sin1_baseline");
    j["attacks"] = {actuator(1, nlohmann::json::parse(R"({"type": "sin", "amplitude": 1, "omega": 1})"))};
    add(j, "Rotation agents; sin(k) on root agent 1. Not IMP for this plant, so the deviation stays bounded.");
  }
  return out;
}

}  // namespace

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> all = build();
  return all;
}

std::optional<nlohmann::json> find_bundled(const std::string& name) {
  for (const auto& s : bundled_scenarios())
    if (s.name == name) return s.doc;
  return std::nullopt;
}

}  // namespace dmas
