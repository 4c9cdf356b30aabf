#pragma once

#include "dmas/graph.hpp"
#include "dmas/linalg.hpp"
#include "dmas/lti.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dmas {

enum class Channel { Actuator, Sensor };

const char* to_string(Channel c);

/// Attack signal y(t) = C W^t f0, t = k - start. Constants use W = [1];
/// sinusoids a sin(w t + phi) use the 2x2 rotation that advances
/// [sin, cos]; general exogenous dynamics use C = I.
class SignalGenerator {
 public:
  static SignalGenerator constant(Vec value);
  static SignalGenerator sinusoid(Vec amplitude, double omega, double phase = 0.0);
  static SignalGenerator exogenous(Mat W, Vec f0);

  enum class Kind { Constant, Sinusoid, Exogenous };

  Kind kind() const noexcept { return kind_; }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(c_.rows()); }
  const Mat& dynamics() const noexcept { return w_; }
  const Vec& initial() const noexcept { return f0_; }
  const Mat& output_map() const noexcept { return c_; }

  /// Value t steps after the attack started (t >= 0).
  Vec value(std::int64_t t) const;
  /// sup_t ||y(t)||_2 when W is norm-preserving or contracting; otherwise the
  /// bound over the first `horizon` steps.
  double amplitude_bound(std::int64_t horizon = 1000) const;

 private:
  SignalGenerator(Kind kind, Mat w, Vec f0, Mat c) : kind_(kind), w_(std::move(w)), f0_(std::move(f0)), c_(std::move(c)) {}
  Kind kind_;
  Mat w_;
  Vec f0_;
  Mat c_;
};

struct AttackSpec {
  AgentIndex target_agent = 0;
  Channel channel = Channel::Actuator;
  SignalGenerator generator = SignalGenerator::constant(Vec::Ones(1));
  std::int64_t start_step = 0;
};

/// Zero before start_step, generator output afterwards.
Vec attack_value(const AttackSpec& spec, std::int64_t k);

/// Stacked injections u^a (N*m) and x^a (N*n) at step k; several attacks on
/// the same agent and channel add up. Throws DimensionError if a generator's
/// width does not match its channel.
struct Injections {
  Vec actuator;
  Vec sensor;
};
Injections injections_at(std::span<const AttackSpec> specs, std::size_t n_agents, const LtiModel& model,
                         std::int64_t k);

void validate_attack(const AttackSpec& spec, std::size_t n_agents, const LtiModel& model);

enum class ImpVerdict { Imp, NonImp };
const char* to_string(ImpVerdict v);

struct ImpClassification {
  std::vector<Complex> lambda_w;
  std::vector<Complex> lambda_a;
  std::vector<Complex> matched_eigenvalues;
  ImpVerdict verdict = ImpVerdict::NonImp;
};

/// IMP iff every eigenvalue of the generator dynamics lies within `tol` of an
/// eigenvalue of A.
ImpClassification classify_imp(const AttackSpec& spec, const LtiModel& model, double tol = 1e-8);

/// f = -c (L-hat (x) K) x^a + u^a: what each agent's dynamics actually receive
/// through B. Equivalent to the per-agent sum over neighbour sensor corruptions
/// plus the agent's own actuator injection.
Vec effective_attack(const Injections& inj, const GraphSpectrum& spectrum, const Mat& K, double c);

/// S = sum_j p_j f_j. Throws NumericalError without a spanning tree.
Vec attack_projection(const Vec& f, const GraphSpectrum& spectrum, std::size_t input_dim);

}  // namespace dmas
