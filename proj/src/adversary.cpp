#include "dmas/adversary.hpp"

#include "dmas/errors.hpp"

#include <cmath>
#include <string>

namespace dmas {

const char* to_string(Channel c) { return c == Channel::Actuator ? "actuator" : "sensor"; }
const char* to_string(ImpVerdict v) { return v == ImpVerdict::Imp ? "IMP" : "non-IMP"; }

SignalGenerator SignalGenerator::constant(Vec value) {
  if (value.size() == 0) throw DimensionError("constant attack needs a nonempty value");
  Mat c = value;
  return SignalGenerator(Kind::Constant, Mat::Ones(1, 1), Vec::Ones(1), std::move(c));
}

SignalGenerator SignalGenerator::sinusoid(Vec amplitude, double omega, double phase) {
  if (amplitude.size() == 0) throw DimensionError("sinusoid attack needs a nonempty amplitude");
  Mat w(2, 2);
  w << std::cos(omega), std::sin(omega), -std::sin(omega), std::cos(omega);
  Vec f0(2);
  f0 << std::sin(phase), std::cos(phase);
  Mat c = Mat::Zero(amplitude.size(), 2);
  c.col(0) = amplitude;
  return SignalGenerator(Kind::Sinusoid, std::move(w), std::move(f0), std::move(c));
}

SignalGenerator SignalGenerator::exogenous(Mat W, Vec f0) {
  if (W.rows() == 0 || W.rows() != W.cols()) throw DimensionError("exogenous dynamics W must be square");
  if (f0.size() != W.rows()) throw DimensionError("exogenous initial vector must match W");
  const auto d = W.rows();
  return SignalGenerator(Kind::Exogenous, std::move(W), std::move(f0), Mat::Identity(d, d));
}

Vec SignalGenerator::value(std::int64_t t) const {
  if (t < 0) return Vec::Zero(c_.rows());
  return c_ * (matrix_power(w_, t) * f0_);
}

double SignalGenerator::amplitude_bound(std::int64_t horizon) const {
  if (kind_ == Kind::Constant) return c_.norm();
  if (kind_ == Kind::Sinusoid) return c_.col(0).norm();
  double sup = 0.0;
  Vec s = f0_;
  for (std::int64_t t = 0; t < horizon; ++t) {
    sup = std::max(sup, (c_ * s).norm());
    s = w_ * s;
  }
  return sup;
}

Vec attack_value(const AttackSpec& spec, std::int64_t k) {
  if (k < spec.start_step) return Vec::Zero(static_cast<Eigen::Index>(spec.generator.output_dim()));
  return spec.generator.value(k - spec.start_step);
}

void validate_attack(const AttackSpec& spec, std::size_t n_agents, const LtiModel& model) {
  if (spec.target_agent >= n_agents)
    throw std::out_of_range("attack targets agent " + std::to_string(spec.target_agent) + " of " +
                            std::to_string(n_agents));
  if (spec.start_step < 0) throw std::invalid_argument("attack start step must be >= 0");
  const std::size_t want = spec.channel == Channel::Actuator ? model.input_dim() : model.state_dim();
  if (spec.generator.output_dim() != want)
    throw DimensionError(std::string(to_string(spec.channel)) + " attack signal must have " + std::to_string(want) +
                         " components, got " + std::to_string(spec.generator.output_dim()));
}

Injections injections_at(std::span<const AttackSpec> specs, std::size_t n_agents, const LtiModel& model,
                         std::int64_t k) {
  const std::size_t n = model.state_dim();
  const std::size_t m = model.input_dim();
  Injections inj{Vec::Zero(static_cast<Eigen::Index>(n_agents * m)),
                 Vec::Zero(static_cast<Eigen::Index>(n_agents * n))};
  for (const AttackSpec& s : specs) {
    validate_attack(s, n_agents, model);
    if (k < s.start_step) continue;
    if (s.channel == Channel::Actuator) {
      agent_block(inj.actuator, s.target_agent, m) += attack_value(s, k);
    } else {
      agent_block(inj.sensor, s.target_agent, n) += attack_value(s, k);
    }
  }
  return inj;
}

ImpClassification classify_imp(const AttackSpec& spec, const LtiModel& model, double tol) {
  ImpClassification out;
  const CVec w = eigenvalues(spec.generator.dynamics());
  out.lambda_w.assign(w.data(), w.data() + w.size());
  out.lambda_a.assign(model.eigenvalues().data(), model.eigenvalues().data() + model.eigenvalues().size());
  bool all = true;
  for (const Complex& lw : out.lambda_w) {
    bool hit = false;
    for (const Complex& la : out.lambda_a) {
      if (std::abs(lw - la) <= tol) {
        hit = true;
        break;
      }
    }
    if (hit) {
      out.matched_eigenvalues.push_back(lw);
    } else {
      all = false;
    }
  }
  out.verdict = all ? ImpVerdict::Imp : ImpVerdict::NonImp;
  return out;
}

Vec effective_attack(const Injections& inj, const GraphSpectrum& spectrum, const Mat& K, double c) {
  const std::size_t N = spectrum.size();
  const auto m = K.rows();
  const auto n = K.cols();
  if (inj.actuator.size() != static_cast<Eigen::Index>(N) * m || inj.sensor.size() != static_cast<Eigen::Index>(N) * n)
    throw DimensionError("injection vectors do not match graph size and gain dimensions");
  Vec f = inj.actuator;
  const Mat& L = spectrum.normalized_laplacian;
  for (std::size_t i = 0; i < N; ++i) {
    Vec mix = Vec::Zero(n);
    for (std::size_t j = 0; j < N; ++j) {
      const double l = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (l != 0.0) mix += l * agent_block(inj.sensor, j, static_cast<std::size_t>(n));
    }
    agent_block(f, i, static_cast<std::size_t>(m)) -= c * (K * mix);
  }
  return f;
}

Vec attack_projection(const Vec& f, const GraphSpectrum& spectrum, std::size_t input_dim) {
  const Vec& r = spectrum.left_eigvec();
  if (f.size() != static_cast<Eigen::Index>(spectrum.size() * input_dim))
    throw DimensionError("attack vector must have N*m entries");
  Vec s = Vec::Zero(static_cast<Eigen::Index>(input_dim));
  for (std::size_t j = 0; j < spectrum.size(); ++j) s += r[static_cast<Eigen::Index>(j)] * agent_block(f, j, input_dim);
  return s;
}

}  // namespace dmas
