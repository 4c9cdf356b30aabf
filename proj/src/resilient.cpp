#include "dmas/resilient.hpp"

#include "dmas/errors.hpp"

#include <cmath>

namespace dmas {

ConsensusProtocol::ConsensusProtocol(const LtiModel& model, const GraphSpectrum& spectrum,
                                     const ControllerConfig& ctrl, std::optional<LeaderConfig> leader)
    : model_(&model), spectrum_(&spectrum), ctrl_(&ctrl), leader_(std::move(leader)) {
  if (ctrl.K.rows() != static_cast<Eigen::Index>(model.input_dim()) ||
      ctrl.K.cols() != static_cast<Eigen::Index>(model.state_dim()))
    throw DimensionError("gain K must be input_dim x state_dim");
  if (leader_) {
    if (leader_->agent >= spectrum.size()) throw std::out_of_range("leader index out of range");
    if (leader_->K0.rows() != ctrl.K.rows() || leader_->K0.cols() != ctrl.K.cols())
      throw DimensionError("leader gain K0 must be input_dim x state_dim");
    if (leader_->reference.output_dim() != model.input_dim())
      throw DimensionError("leader reference must have input_dim components");
  }
}

Vec ConsensusProtocol::tracking_errors(const Vec& x) const {
  const std::size_t n = model_->state_dim();
  const std::size_t N = agents();
  const Mat& L = spectrum_->normalized_laplacian;
  Vec eps = Vec::Zero(x.size());
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const double l = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (l != 0.0) agent_block(eps, i, n) -= l * agent_block(x, j, n);
    }
  }
  return eps;
}

Vec ConsensusProtocol::nominal_inputs(const Vec& x, const Vec& eps, std::int64_t k) const {
  const std::size_t n = model_->state_dim();
  const std::size_t m = model_->input_dim();
  Vec u = baseline_control(eps, *ctrl_);
  if (!leader_) return u;

  const AgentIndex l = leader_->agent;
  const Vec u0 = -leader_->K0 * agent_block(x, l, n) + leader_->reference.value(k);
  agent_block(u, l, m) = u0;
  const Mat& L = spectrum_->normalized_laplacian;
  for (std::size_t i = 0; i < agents(); ++i) {
    if (i == l) continue;
    // -L-hat(i, l) = a_il / (1 + h_i)
    const double w = -L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
    if (w != 0.0) agent_block(u, i, m) += w * u0;
  }
  return u;
}

PredictorState predictor_step(const PredictorState& pred, const ConsensusProtocol& protocol) {
  const LtiModel& model = protocol.model();
  const std::size_t n = model.state_dim();
  const std::size_t m = model.input_dim();
  const Vec eps_hat = protocol.tracking_errors(pred.x_hat);
  const Vec u_hat = protocol.nominal_inputs(pred.x_hat, eps_hat, pred.k);
  PredictorState next{pred.k + 1, Vec(pred.x_hat.size())};
  for (std::size_t i = 0; i < protocol.agents(); ++i)
    agent_block(next.x_hat, i, n) = model.A() * agent_block(pred.x_hat, i, n) + model.B() * agent_block(u_hat, i, m);
  return next;
}

PredictorState predictor_step(const PredictorState& pred, const LtiModel& model, const GraphSpectrum& spectrum,
                              const ControllerConfig& ctrl) {
  return predictor_step(pred, ConsensusProtocol(model, spectrum, ctrl));
}

Vec baseline_control(const Vec& eps_bar, const ControllerConfig& ctrl) {
  const auto n = ctrl.K.cols();
  const auto m = ctrl.K.rows();
  if (eps_bar.size() % n != 0) throw DimensionError("tracking error size is not a multiple of n");
  const auto N = eps_bar.size() / n;
  Vec u(N * m);
  const Mat cK = ctrl.c * ctrl.K;
  for (Eigen::Index i = 0; i < N; ++i) u.segment(i * m, m) = cK * eps_bar.segment(i * n, n);
  return u;
}

Vec resilient_control(const Vec& eps_bar, const CompensatorState& comp, const ControllerConfig& ctrl) {
  Vec u = baseline_control(eps_bar, ctrl);
  if (comp.d.size() != u.size()) throw DimensionError("compensator state must have N*m entries");
  return u - comp.d;
}

CompensatorState compensator_step(const CompensatorState& comp, const Vec& eps_hat, const Vec& eps_bar,
                                  const ControllerConfig& ctrl) {
  if (eps_hat.size() != eps_bar.size()) throw DimensionError("eps_hat and eps_bar differ in size");
  const Vec drive = baseline_control(eps_hat - eps_bar, ctrl);
  if (comp.d.size() != drive.size()) throw DimensionError("compensator state must have N*m entries");
  return CompensatorState{ctrl.theta * drive + ctrl.theta * comp.d};
}

double dtilde_bound(const ControllerConfig& ctrl, double attack_bound, double zeta, double sensor_attack_bound) {
  const double th = ctrl.theta;
  const double denom = 1.0 / (th * th) - 2.0 - 2.0 * ctrl.coupling_term;
  if (!(denom > 0.0)) throw NumericalError("attack-rejection bound undefined for this theta; choose a smaller theta");
  const double numer =
      std::abs(1.0 - zeta / th) * attack_bound + std::abs(2.0 - zeta / th) * sensor_attack_bound;
  return 4.0 * numer / denom;
}

double disagreement_gain(const LtiModel& model, const GraphSpectrum& spectrum, const ControllerConfig& ctrl) {
  const auto N = static_cast<Eigen::Index>(spectrum.size());
  const ClosedLoopMatrix cl = assemble_closed_loop(model, spectrum, ctrl.K, ctrl.c);
  if (!cl.consensus_modes_schur) throw NumericalError("disagreement dynamics are not Schur");
  const Vec& r = spectrum.left_eigvec();
  const Mat pi = Mat::Identity(N, N) - Vec::Ones(N) * r.transpose();
  const Mat proj = kron(pi, Mat::Identity(model.state_dim(), model.state_dim()));
  // Re-project every step so rounding in the consensus direction cannot grow.
  Mat term = kron(pi, model.B());
  double gain = 0.0;
  for (int j = 0; j < 100000; ++j) {
    const double row_sum = term.cwiseAbs().rowwise().sum().maxCoeff();
    gain += row_sum;
    if (row_sum < 1e-14 * std::max(1.0, gain)) break;
    term = proj * (cl.matrix * term);
  }
  return gain;
}

}  // namespace dmas
