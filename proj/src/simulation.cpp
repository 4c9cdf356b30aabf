#include "dmas/simulation.hpp"

#include "dmas/errors.hpp"
#include "dmas/resilient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dmas {

namespace {

double inf_norm_mat(const Mat& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

PreparedScenario prepare(const ScenarioConfig& cfg) {
  LtiModel model(cfg.A, cfg.B);
  DirectedGraph graph = build_graph(cfg);
  GraphSpectrum spectrum = normalized_laplacian(graph);
  if (!has_spanning_tree(graph)) throw NumericalError("communication graph has no spanning tree");
  for (const auto& a : cfg.attacks) validate_attack(a, cfg.n_agents, model);

  ControllerConfig ctrl = make_controller(model, spectrum, cfg.design);
  PreparedScenario prep{cfg, std::move(model), std::move(graph), std::move(spectrum), std::move(ctrl), Verdict::Consensus, 0.0, 0.0, std::nullopt, std::nullopt, {}};
  prep.warnings = prep.ctrl.notes;
  prep.predicted = destabilization_verdict(cfg.attacks, prep.model, prep.spectrum, prep.ctrl);

  const std::int64_t span = std::max<std::int64_t>(cfg.horizon, 1);
  // 2-norm bounds: the sensor part of f is -c (Lhat (x) K) x^a
  const double l_norm = Eigen::JacobiSVD<Mat>(prep.spectrum.normalized_laplacian).singularValues()(0);
  const double cK = prep.ctrl.c * Eigen::JacobiSVD<Mat>(prep.ctrl.K).singularValues()(0);
  for (const auto& a : cfg.attacks) {
    const double amp = a.generator.amplitude_bound(span);
    if (a.channel == Channel::Actuator) prep.actuator_bound += amp;
    else prep.sensor_bound += cK * l_norm * amp;
  }

  try {
    prep.dtilde_bound = dtilde_bound(prep.ctrl, prep.actuator_bound, cfg.zeta, prep.sensor_bound);
  } catch (const NumericalError& e) {
    prep.warnings.push_back(e.what());
  }
  if (prep.dtilde_bound) {
    try {
      prep.consensus_threshold = disagreement_gain(prep.model, prep.spectrum, prep.ctrl) * *prep.dtilde_bound;
    } catch (const NumericalError& e) {
      prep.warnings.push_back(e.what());
    }
  }
  return prep;
}

Diagnostics validate(const ScenarioConfig& cfg) {
  Diagnostics diag;
  try {
    const PreparedScenario prep = prepare(cfg);
    diag.warnings = prep.warnings;
    const auto& ctrl = prep.ctrl;
    if (ctrl.range && ctrl.range->empty())
      diag.warnings.push_back("coupling range is empty (lower " + fmt(ctrl.range->lower) + ", upper " +
                              fmt(ctrl.range->upper) + "); c chosen by " + to_string(ctrl.coupling_source));
    if (!ctrl.coupling_in_range) diag.warnings.push_back("c = " + fmt(ctrl.c) + " lies outside the sufficient range");
    if (!ctrl.consensus_modes_schur) {
      diag.ok = false;
      diag.errors.push_back("closed loop is not Schur on the disagreement modes (max radius " +
                            fmt(ctrl.max_mode_radius) + ")");
    }
    if (cfg.controller == ControllerKind::Resilient && !(ctrl.theta < ctrl.theta_max))
      diag.warnings.push_back("theta = " + fmt(ctrl.theta) + " is not below the bound " + fmt(ctrl.theta_max));
    if (cfg.controller == ControllerKind::Resilient && !(ctrl.compensated_radius < 1.0))
      diag.warnings.push_back("compensated loop radius " + fmt(ctrl.compensated_radius) + " is not below 1");
  } catch (const ConfigError& e) {
    diag.ok = false;
    diag.errors.push_back(e.what());
  } catch (const NumericalError& e) {
    diag.ok = false;
    diag.errors.push_back(e.what());
  } catch (const std::invalid_argument& e) {
    diag.ok = false;
    diag.errors.push_back(e.what());
  } catch (const std::out_of_range& e) {
    diag.ok = false;
    diag.errors.push_back(e.what());
  }
  return diag;
}

SimulationTrace run(const PreparedScenario& prep) {
  const ScenarioConfig& cfg = prep.config;
  const LtiModel& model = prep.model;
  const GraphSpectrum& spectrum = prep.spectrum;
  const ControllerConfig& ctrl = prep.ctrl;
  const std::size_t N = cfg.n_agents;
  const std::size_t n = model.state_dim();
  const std::size_t m = model.input_dim();
  const bool resilient = cfg.controller == ControllerKind::Resilient;

  const ConsensusProtocol protocol(model, spectrum, ctrl, cfg.leader);
  const DivergenceGuard guard{cfg.divergence_threshold};

  SimulationTrace trace;
  trace.n_agents = N;
  trace.state_dim = n;
  trace.input_dim = m;
  trace.steps.reserve(static_cast<std::size_t>(cfg.horizon));

  NetworkState state{0, cfg.x0, cfg.x0 + injections_at(cfg.attacks, N, model, 0).sensor};
  PredictorState pred{0, cfg.predictor_init.value_or(cfg.x0)};
  CompensatorState comp{Vec::Zero(static_cast<Eigen::Index>(N * m))};

  TraceSummary& sum = trace.summary;
  std::optional<std::int64_t> tripped;
  for (std::int64_t k = 0; k < cfg.horizon; ++k) {
    const Injections inj = injections_at(cfg.attacks, N, model, k);
    const Vec eps = protocol.tracking_errors(state.x);
    const Vec eps_bar = protocol.tracking_errors(state.x_c);
    const Vec eps_hat = protocol.tracking_errors(pred.x_hat);
    const bool comp_active = resilient && k >= cfg.compensator_start;

    Vec u = protocol.nominal_inputs(state.x_c, eps_bar, k);
    if (comp_active) u -= comp.d;
    const Vec f = effective_attack(inj, spectrum, ctrl.K, ctrl.c);

    StepRecord rec;
    rec.k = k;
    rec.x = state.x;
    rec.x_c = state.x_c;
    rec.x_hat = pred.x_hat;
    rec.u = u;
    rec.d = comp.d;
    rec.f = f;
    MetricsFrame& mf = rec.metrics;
    mf.k = k;
    mf.eps = eps;
    mf.eps_bar = eps_bar;
    mf.gamma_global = global_performance(state.x, prep.graph, n);
    mf.consensus_err = Vec(static_cast<Eigen::Index>(N));
    const Vec gap = state.x - pred.x_hat;
    for (std::size_t i = 0; i < N; ++i)
      mf.consensus_err(static_cast<Eigen::Index>(i)) = agent_block(gap, i, n).cwiseAbs().maxCoeff();
    mf.consensus_err_global = mf.consensus_err.maxCoeff();
    mf.divergence_flag = guard.tripped(state.x);
    sum.eps_energy += eps.squaredNorm();
    sum.attack_energy += f.squaredNorm();
    trace.steps.push_back(std::move(rec));
    if (mf.divergence_flag) {
      tripped = k;
      break;
    }

    const Injections next = injections_at(cfg.attacks, N, model, k + 1);
    state = step(model, state, u, inj.actuator, next.sensor);
    if (comp_active) comp = compensator_step(comp, eps_hat, eps_bar, ctrl);
    pred = predictor_step(pred, protocol);
  }
  if (!tripped && guard.tripped(state.x)) tripped = cfg.horizon;

  sum.scenario = cfg.name;
  sum.controller = to_string(cfg.controller);
  sum.horizon = cfg.horizon;
  sum.steps_completed = static_cast<std::int64_t>(trace.steps.size());
  sum.predicted = prep.predicted;
  sum.divergence = detect_divergence(trace, cfg.divergence_threshold);
  if (tripped) {
    sum.divergence.first_step = tripped;
    sum.divergence.diverged = true;
  }
  sum.predicted_matches_empirical = (prep.predicted == Verdict::Destabilize) == sum.divergence.diverged;
  sum.tail = tail_metrics(trace);
  sum.K_norm = inf_norm_mat(ctrl.K);
  sum.c = ctrl.c;
  sum.theta = ctrl.theta;
  sum.theta_max = ctrl.theta_max;
  sum.dtilde_bound = prep.dtilde_bound;
  sum.consensus_threshold = prep.consensus_threshold;
  std::size_t n_f = 0;
  for (std::size_t i = 0; i < N; ++i) {
    bool hit = false;
    for (const auto& a : cfg.attacks) hit = hit || a.target_agent == i;
    n_f += hit ? 1 : 0;
  }
  sum.deviation_bound = deviation_bound(model, spectrum, ctrl, n_f, prep.actuator_bound + prep.sensor_bound);
  sum.notes = prep.warnings;
  return trace;
}

SimulationTrace run(const ScenarioConfig& cfg) { return run(prepare(cfg)); }

}  // namespace dmas
