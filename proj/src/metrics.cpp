#include "dmas/metrics.hpp"

#include "dmas/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace dmas {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consensus: return "CONSENSUS";
    case Verdict::BoundedDeviation: return "BOUNDED_DEVIATION";
    case Verdict::Destabilize: return "DESTABILIZE";
  }
  return "?";
}

Vec tracking_error(const Vec& x, const GraphSpectrum& spectrum, std::size_t state_dim) {
  const std::size_t N = spectrum.size();
  if (static_cast<std::size_t>(x.size()) != N * state_dim) throw DimensionError("state vector must have N*n entries");
  const Mat& L = spectrum.normalized_laplacian;
  Vec eps = Vec::Zero(x.size());
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const double l = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (l != 0.0) agent_block(eps, i, state_dim) -= l * agent_block(x, j, state_dim);
    }
  return eps;
}

double global_performance(const Vec& x, const DirectedGraph& g, std::size_t state_dim) {
  const std::size_t N = g.size();
  if (static_cast<std::size_t>(x.size()) != N * state_dim) throw DimensionError("state vector must have N*n entries");
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (g.weight(i, j) > 0.0) sum += (agent_block(x, i, state_dim) - agent_block(x, j, state_dim)).squaredNorm();
  return sum;
}

std::optional<double> deviation_bound(const LtiModel& model, const GraphSpectrum& spectrum,
                                      const ControllerConfig& ctrl, std::size_t n_f, double b_f, double tol) {
  if (n_f == 0 || b_f == 0.0) return 0.0;
  const ClosedLoopMatrix cl = assemble_closed_loop(model, spectrum, ctrl);
  const double lam_min = cl.eigenvalues.cwiseAbs().minCoeff();
  if (lam_min < tol) return std::nullopt;
  const double b_norm = Eigen::JacobiSVD<Mat>(model.B()).singularValues()(0);
  return static_cast<double>(n_f) * b_norm * b_f / lam_min;
}

namespace {

bool projection_nonzero(const AttackSpec& spec, const LtiModel& model, const GraphSpectrum& spectrum,
                        const ControllerConfig& ctrl) {
  if (!spectrum.has_simple_zero()) return false;
  const std::size_t N = spectrum.size();
  const std::array<AttackSpec, 1> one{spec};
  // The projection is a linear function of the generator state; a window of
  // dim(W) + 1 samples decides whether it vanishes identically.
  const auto samples = static_cast<std::int64_t>(spec.generator.dynamics().rows()) + 1;
  for (std::int64_t t = 0; t < samples; ++t) {
    const std::int64_t k = spec.start_step + t;
    const Injections inj = injections_at(one, N, model, k);
    const Vec f = effective_attack(inj, spectrum, ctrl.K, ctrl.c);
    const Vec s = attack_projection(f, spectrum, model.input_dim());
    const double scale = std::max(1.0, attack_value(spec, k).cwiseAbs().maxCoeff());
    if (s.cwiseAbs().maxCoeff() > 1e-10 * scale) return true;
  }
  return false;
}

}  // namespace

Verdict destabilization_verdict(std::span<const AttackSpec> specs, const LtiModel& model,
                                const GraphSpectrum& spectrum, const ControllerConfig& ctrl) {
  if (specs.empty()) return Verdict::Consensus;
  for (const auto& spec : specs) {
    if (classify_imp(spec, model).verdict != ImpVerdict::Imp) continue;
    if (projection_nonzero(spec, model, spectrum, ctrl)) return Verdict::Destabilize;
  }
  return Verdict::BoundedDeviation;
}

std::size_t tail_begin(std::size_t length) {
  if (length == 0) return 0;
  const std::size_t tail = std::max<std::size_t>(1, length / 10);
  return length - tail;
}

HinfBypassReport hinf_bypass_report(const SimulationTrace& trace, std::span<const AgentIndex> compromised,
                                    double gamma_floor, double eps_tol) {
  HinfBypassReport rep;
  const std::size_t n = trace.state_dim;
  for (const auto& s : trace.steps) {
    rep.eps_energy += s.metrics.eps.squaredNorm();
    rep.attack_energy += s.f.squaredNorm();
  }
  if (trace.steps.empty()) return rep;
  rep.final_gamma = trace.steps.back().metrics.gamma_global;
  rep.tail_gamma = std::numeric_limits<double>::infinity();
  for (std::size_t t = tail_begin(trace.steps.size()); t < trace.steps.size(); ++t) {
    const auto& m = trace.steps[t].metrics;
    rep.tail_gamma = std::min(rep.tail_gamma, m.gamma_global);
    for (std::size_t i = 0; i < trace.n_agents; ++i) {
      if (std::find(compromised.begin(), compromised.end(), i) != compromised.end()) continue;
      rep.intact_tail_eps = std::max(rep.intact_tail_eps, agent_block(m.eps, i, n).cwiseAbs().maxCoeff());
    }
  }
  rep.bypassed = rep.intact_tail_eps < eps_tol && rep.tail_gamma > gamma_floor;
  return rep;
}

TailMetrics tail_metrics(const SimulationTrace& trace) {
  TailMetrics t;
  const std::size_t N = trace.n_agents;
  const std::size_t n = trace.state_dim;
  t.agent_consensus_err.assign(N, 0.0);
  t.agent_eps.assign(N, 0.0);
  if (trace.steps.empty()) return t;
  t.gamma_min = std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t s = tail_begin(trace.steps.size()); s < trace.steps.size(); ++s) {
    const auto& r = trace.steps[s];
    const auto& m = r.metrics;
    t.consensus_err = std::max(t.consensus_err, m.consensus_err_global);
    for (std::size_t i = 0; i < N; ++i) {
      t.agent_consensus_err[i] = std::max(t.agent_consensus_err[i], m.consensus_err(static_cast<Eigen::Index>(i)));
      t.agent_eps[i] = std::max(t.agent_eps[i], agent_block(m.eps, i, n).cwiseAbs().maxCoeff());
    }
    t.gamma_max = std::max(t.gamma_max, m.gamma_global);
    t.gamma_min = std::min(t.gamma_min, m.gamma_global);
    t.state_max = std::max(t.state_max, r.x.cwiseAbs().maxCoeff());
    if (r.d.size() == r.f.size()) t.dtilde = std::max(t.dtilde, (r.d - r.f).cwiseAbs().maxCoeff());
    lo = std::min(lo, m.consensus_err_global);
    hi = std::max(hi, m.consensus_err_global);
  }
  t.stationary = (hi - lo) < 1e-6;
  return t;
}

DivergenceReport detect_divergence(const SimulationTrace& trace, double threshold) {
  DivergenceReport rep;
  const auto& steps = trace.steps;
  for (const auto& s : steps) {
    const bool finite = all_finite(s.x);
    if (!finite || s.x.cwiseAbs().maxCoeff() > threshold) {
      rep.first_step = s.k;
      break;
    }
  }
  if (!steps.empty()) rep.final_state_norm = steps.back().x.cwiseAbs().maxCoeff();

  constexpr std::size_t kWindows = 4;
  const std::size_t half = steps.size() / 2;
  const std::size_t width = (steps.size() - half) / kWindows;
  if (width >= 4) {
    std::array<double, kWindows> peak{};
    for (std::size_t w = 0; w < kWindows; ++w)
      for (std::size_t s = half + w * width; s < half + (w + 1) * width; ++s)
        peak[w] = std::max(peak[w], steps[s].x.cwiseAbs().maxCoeff());
    bool growing = peak[0] > 0.0;
    for (std::size_t w = 1; w < kWindows && growing; ++w) growing = peak[w] > 1.02 * peak[w - 1];
    rep.secular_growth = growing;
    if (peak[0] > 0.0 && peak[kWindows - 1] > 0.0 && std::isfinite(peak[kWindows - 1]))
      rep.growth_rate = std::log(peak[kWindows - 1] / peak[0]) / static_cast<double>((kWindows - 1) * width);
  }
  rep.diverged = rep.first_step.has_value() || rep.secular_growth;
  return rep;
}

}  // namespace dmas
