#pragma once

#include "dmas/adversary.hpp"
#include "dmas/control_design.hpp"
#include "dmas/graph.hpp"
#include "dmas/lti.hpp"
#include "dmas/trace.hpp"

#include <optional>
#include <span>

namespace dmas {

/// eps_i = (1 + h_i)^{-1} sum_j a_ij (x_j - x_i), stacked. Pass sensor
/// readings instead of x for eps_bar.
Vec tracking_error(const Vec& x, const GraphSpectrum& spectrum, std::size_t state_dim);

/// Sum over ordered neighbour pairs (a_ij > 0) of ||x_i - x_j||^2.
double global_performance(const Vec& x, const DirectedGraph& g, std::size_t state_dim);

/// N_f ||B||_2 b_f / |lambda_min(A_c)|, with lambda_min the smallest-modulus
/// eigenvalue. Empty when that modulus is below tol.
std::optional<double> deviation_bound(const LtiModel& model, const GraphSpectrum& spectrum,
                                      const ControllerConfig& ctrl, std::size_t n_f, double b_f,
                                      double tol = 1e-9);

/// DESTABILIZE when some attack is IMP and hits a root (its own projection S
/// is nonzero); BOUNDED_DEVIATION for any other attack; CONSENSUS otherwise.
Verdict destabilization_verdict(std::span<const AttackSpec> specs, const LtiModel& model,
                                const GraphSpectrum& spectrum, const ControllerConfig& ctrl);

struct HinfBypassReport {
  double eps_energy = 0.0;        ///< sum_k eps'eps
  double attack_energy = 0.0;     ///< sum_k f'f
  double intact_tail_eps = 0.0;   ///< max tail ||eps_i||_inf over intact agents
  double tail_gamma = 0.0;        ///< min tail Gamma
  double final_gamma = 0.0;
  bool bypassed = false;          ///< intact_tail_eps < eps_tol while tail_gamma > gamma_floor
};

HinfBypassReport hinf_bypass_report(const SimulationTrace& trace, std::span<const AgentIndex> compromised,
                                    double gamma_floor = 0.1, double eps_tol = 1e-6);

/// First index of the tail window (last 10%, at least one step).
std::size_t tail_begin(std::size_t length);

TailMetrics tail_metrics(const SimulationTrace& trace);

/// Secular-growth test on ||x||_inf: over four windows spanning the second half
/// of the run, the window maxima must each grow by more than 2%.
DivergenceReport detect_divergence(const SimulationTrace& trace, double threshold = 1e9);

}  // namespace dmas
