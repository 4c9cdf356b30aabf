#pragma once

#include "dmas/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dmas {

struct MetricsFrame {
  std::int64_t k = 0;
  Vec eps;             ///< on true states
  Vec eps_bar;         ///< on sensor readings
  double gamma_global = 0.0;
  Vec consensus_err;   ///< per-agent ||x_i - x_hat_i||_inf
  double consensus_err_global = 0.0;
  bool divergence_flag = false;
};

struct StepRecord {
  std::int64_t k = 0;
  Vec x;
  Vec x_c;
  Vec x_hat;
  Vec u;  ///< controller output, before actuator injection
  Vec d;
  Vec f;  ///< effective attack
  MetricsFrame metrics;
};

enum class Verdict { Consensus, BoundedDeviation, Destabilize };
const char* to_string(Verdict v);

struct TailMetrics {
  double consensus_err = 0.0;        ///< max over tail of ||x - x_hat||_inf
  std::vector<double> agent_consensus_err;
  std::vector<double> agent_eps;     ///< max over tail of ||eps_i||_inf
  double gamma_max = 0.0;
  double gamma_min = 0.0;
  double state_max = 0.0;
  double dtilde = 0.0;               ///< max over tail of ||d - f||_inf
  bool stationary = false;
};

struct DivergenceReport {
  bool diverged = false;
  std::optional<std::int64_t> first_step;  ///< hard threshold or non-finite
  bool secular_growth = false;
  double growth_rate = 0.0;                ///< fitted slope of log ||x||_inf per step
  double final_state_norm = 0.0;
};

struct TraceSummary {
  std::string scenario;
  std::string controller;
  std::int64_t horizon = 0;
  std::int64_t steps_completed = 0;
  Verdict predicted = Verdict::Consensus;
  bool predicted_matches_empirical = true;
  DivergenceReport divergence;
  TailMetrics tail;
  double K_norm = 0.0;
  double c = 0.0;
  double theta = 0.0;
  double theta_max = 0.0;
  std::optional<double> dtilde_bound;
  std::optional<double> consensus_threshold;
  std::optional<double> deviation_bound;
  double eps_energy = 0.0;
  double attack_energy = 0.0;
  std::vector<std::string> notes;
};

struct SimulationTrace {
  std::size_t n_agents = 0;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::vector<StepRecord> steps;
  TraceSummary summary;
};

}  // namespace dmas
