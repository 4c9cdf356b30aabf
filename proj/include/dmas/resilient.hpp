#pragma once

#include "dmas/adversary.hpp"
#include "dmas/control_design.hpp"
#include "dmas/graph.hpp"
#include "dmas/lti.hpp"

#include <cstdint>
#include <optional>

namespace dmas {

/// Trusted leader running u_0 = -K0 x_0 + r(k). Followers add the feedforward
/// (1 + h_i)^{-1} a_{i0} u_0 to their own input.
struct LeaderConfig {
  AgentIndex agent = 0;
  Mat K0;
  SignalGenerator reference = SignalGenerator::constant(Vec::Zero(1));
};

/// The nominal distributed law u_i = c K eps_i, optionally with a leader.
/// Shared by the plant-side controllers and the expected state predictor so
/// both run identical dynamics.
class ConsensusProtocol {
 public:
  ConsensusProtocol(const LtiModel& model, const GraphSpectrum& spectrum, const ControllerConfig& ctrl,
                    std::optional<LeaderConfig> leader = std::nullopt);

  std::size_t agents() const noexcept { return spectrum_->size(); }
  const LtiModel& model() const noexcept { return *model_; }
  const GraphSpectrum& spectrum() const noexcept { return *spectrum_; }
  const ControllerConfig& controller() const noexcept { return *ctrl_; }
  const std::optional<LeaderConfig>& leader() const noexcept { return leader_; }

  /// eps = -(L-hat (x) I_n) x, stacked.
  Vec tracking_errors(const Vec& x) const;
  /// c K eps_i for followers, plus leader input / feedforward when configured.
  Vec nominal_inputs(const Vec& x, const Vec& eps, std::int64_t k) const;

 private:
  const LtiModel* model_;
  const GraphSpectrum* spectrum_;
  const ControllerConfig* ctrl_;
  std::optional<LeaderConfig> leader_;
};

struct PredictorState {
  std::int64_t k = 0;
  Vec x_hat;
};

struct CompensatorState {
  Vec d;
};

/// x_hat(k+1) = (I (x) A) x_hat + (I (x) B) u_hat with u_hat from the
/// protocol applied to x_hat alone; without a leader this is A_c x_hat.
PredictorState predictor_step(const PredictorState& pred, const ConsensusProtocol& protocol);

/// Leaderless convenience overload.
PredictorState predictor_step(const PredictorState& pred, const LtiModel& model, const GraphSpectrum& spectrum,
                              const ControllerConfig& ctrl);

/// u_i = c K eps_bar_i.
Vec baseline_control(const Vec& eps_bar, const ControllerConfig& ctrl);

/// u_i = c K eps_bar_i - d_i.
Vec resilient_control(const Vec& eps_bar, const CompensatorState& comp, const ControllerConfig& ctrl);

/// d_i(k+1) = theta c K (eps_hat_i - eps_bar_i) + theta d_i(k).
CompensatorState compensator_step(const CompensatorState& comp, const Vec& eps_hat, const Vec& eps_bar,
                                  const ControllerConfig& ctrl);

/// Ultimate bound on ||d - f||:
///   4 ||f_bar - zeta f / theta|| / (theta^-2 - 2 - 2 lambda_min(c L-hat B'P1B R1_bar^-1))
/// with f_bar = 2 f_sensor + f_actuator, bounded through the triangle inequality
/// from the actuator and sensor contributions. Throws NumericalError when the
/// denominator is not positive.
double dtilde_bound(const ControllerConfig& ctrl, double attack_bound, double zeta = 1.0,
                    double sensor_attack_bound = 0.0);

/// Gain from a bounded d - f to the disagreement part of x - x_hat: the
/// l1 norm (inf-induced) of the impulse response A_c^j (Pi (x) B), where
/// Pi = I - 1 r^T projects out the consensus direction. Throws NumericalError
/// when the disagreement dynamics are not Schur.
double disagreement_gain(const LtiModel& model, const GraphSpectrum& spectrum, const ControllerConfig& ctrl);

}  // namespace dmas
