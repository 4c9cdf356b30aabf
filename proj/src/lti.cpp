#include "dmas/lti.hpp"

#include "dmas/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dmas {

namespace {
constexpr double kMarginalTol = 1e-9;
}

LtiModel::LtiModel(Mat a, Mat b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) throw DimensionError("A must be a nonempty square matrix");
  if (b_.rows() != a_.rows() || b_.cols() == 0)
    throw DimensionError("B must have as many rows as A and at least one column");
  eig_ = dmas::eigenvalues(a_);
  const auto n = a_.rows();
  for (Eigen::Index i = 0; i < eig_.size(); ++i) {
    const Complex l = eig_[i];
    if (std::abs(l) < 1.0 - kMarginalTol) continue;
    marginal_.push_back(l);
    CMat pbh(n, n + b_.cols());
    pbh << l * CMat::Identity(n, n) - a_.cast<Complex>(), b_.cast<Complex>();
    Eigen::ColPivHouseholderQR<CMat> qr(pbh);
    qr.setThreshold(1e-10);
    if (qr.rank() < n) stabilizable_ = false;
  }
}

double ClosedLoopMatrix::max_mode_radius() const {
  return mode_radii.empty() ? 0.0 : *std::max_element(mode_radii.begin(), mode_radii.end());
}

double mode_radius(const LtiModel& model, Complex lambda, const Mat& K, double c) {
  const CMat m = model.A().cast<Complex>() - (c * lambda) * (model.B() * K).cast<Complex>();
  return spectral_radius(m);
}

ClosedLoopMatrix assemble_closed_loop(const LtiModel& model, const GraphSpectrum& spectrum, const Mat& K,
                                      double c) {
  if (K.rows() != static_cast<Eigen::Index>(model.input_dim()) ||
      K.cols() != static_cast<Eigen::Index>(model.state_dim()))
    throw DimensionError("gain K must be input_dim x state_dim");
  const auto n_agents = static_cast<Eigen::Index>(spectrum.size());
  ClosedLoopMatrix cl;
  cl.matrix = kron(Mat::Identity(n_agents, n_agents), model.A()) -
              c * kron(spectrum.normalized_laplacian, model.B() * K);
  cl.eigenvalues = eigenvalues(cl.matrix);
  for (const Complex& l : spectrum.nonzero_eigenvalues()) cl.mode_radii.push_back(mode_radius(model, l, K, c));
  cl.consensus_modes_schur =
      std::all_of(cl.mode_radii.begin(), cl.mode_radii.end(), [](double r) { return r < 1.0; });
  return cl;
}

NetworkState step(const LtiModel& model, const NetworkState& state, const Vec& controls,
                  const Vec& actuator_injection, const Vec& next_sensor_injection) {
  const std::size_t n = model.state_dim();
  const std::size_t m = model.input_dim();
  if (state.x.size() % static_cast<Eigen::Index>(n) != 0) throw DimensionError("state size is not a multiple of n");
  const std::size_t agents = static_cast<std::size_t>(state.x.size()) / n;
  if (controls.size() != static_cast<Eigen::Index>(agents * m) || actuator_injection.size() != controls.size())
    throw DimensionError("control/actuator vectors must have N*m entries");
  if (next_sensor_injection.size() != state.x.size()) throw DimensionError("sensor injection must have N*n entries");

  NetworkState next;
  next.k = state.k + 1;
  next.x.resize(state.x.size());
  for (std::size_t i = 0; i < agents; ++i) {
    agent_block(next.x, i, n) =
        model.A() * agent_block(state.x, i, n) +
        model.B() * (agent_block(controls, i, m) + agent_block(actuator_injection, i, m));
  }
  next.x_c = next.x + next_sensor_injection;
  return next;
}

ConsensusPrediction::ConsensusPrediction(const LtiModel& model, const GraphSpectrum& spectrum, const Vec& x0)
    : a_(model.A()), v0_(Vec::Zero(static_cast<Eigen::Index>(model.state_dim()))) {
  const Vec& r = spectrum.left_eigvec();
  const std::size_t n = model.state_dim();
  if (x0.size() != static_cast<Eigen::Index>(spectrum.size() * n)) throw DimensionError("x0 must have N*n entries");
  for (std::size_t i = 0; i < spectrum.size(); ++i) v0_ += r[static_cast<Eigen::Index>(i)] * agent_block(x0, i, n);
}

Vec ConsensusPrediction::at(std::int64_t k) const { return matrix_power(a_, k) * v0_; }

std::vector<Vec> ConsensusPrediction::trajectory(std::int64_t horizon) const {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
  Vec v = v0_;
  for (std::int64_t k = 0; k < horizon; ++k) {
    out.push_back(v);
    v = a_ * v;
  }
  return out;
}

ConsensusPrediction predict_consensus_value(const LtiModel& model, const GraphSpectrum& spectrum, const Vec& x0) {
  return ConsensusPrediction(model, spectrum, x0);
}

bool DivergenceGuard::tripped(const Vec& x) const { return !all_finite(x) || inf_norm(x) > threshold; }

}  // namespace dmas
