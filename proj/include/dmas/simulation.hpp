#pragma once

#include "dmas/control_design.hpp"
#include "dmas/graph.hpp"
#include "dmas/lti.hpp"
#include "dmas/metrics.hpp"
#include "dmas/scenario_config.hpp"
#include "dmas/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dmas {

/// Everything that can be decided before stepping.
struct PreparedScenario {
  ScenarioConfig config;
  LtiModel model;
  DirectedGraph graph;
  GraphSpectrum spectrum;
  ControllerConfig ctrl;
  Verdict predicted = Verdict::Consensus;
  double actuator_bound = 0.0;  ///< 2-norm bound on the actuator part of f
  double sensor_bound = 0.0;    ///< 2-norm bound on the sensor part of f
  std::optional<double> dtilde_bound;
  std::optional<double> consensus_threshold;  ///< disagreement_gain * dtilde_bound
  std::vector<std::string> warnings;
};

PreparedScenario prepare(const ScenarioConfig& cfg);

struct Diagnostics {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

/// Static checks (spanning tree, gain design, coupling range, theta bound)
/// without stepping.
Diagnostics validate(const ScenarioConfig& cfg);

SimulationTrace run(const PreparedScenario& prep);
SimulationTrace run(const ScenarioConfig& cfg);

}  // namespace dmas
