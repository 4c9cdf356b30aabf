#pragma once

#include "dmas/graph.hpp"
#include "dmas/linalg.hpp"

#include <cstdint>
#include <vector>

namespace dmas {

/// Shared agent dynamics x(k+1) = A x(k) + B u(k).
class LtiModel {
 public:
  /// Throws DimensionError if A is not square or B has a different row count.
  LtiModel(Mat a, Mat b);

  const Mat& A() const noexcept { return a_; }
  const Mat& B() const noexcept { return b_; }
  std::size_t state_dim() const noexcept { return static_cast<std::size_t>(a_.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(b_.cols()); }

  const CVec& eigenvalues() const noexcept { return eig_; }
  /// Eigenvalues with |lambda| >= 1 - 1e-9.
  const std::vector<Complex>& marginal_eigenvalues() const noexcept { return marginal_; }
  /// PBH test on every eigenvalue outside the open unit disc.
  bool stabilizable() const noexcept { return stabilizable_; }
  bool is_schur() const noexcept { return marginal_.empty(); }

 private:
  Mat a_;
  Mat b_;
  CVec eig_;
  std::vector<Complex> marginal_;
  bool stabilizable_ = true;
};

/// Global plant state: stacked x_i and the measurements x_i^c the agents see.
struct NetworkState {
  std::int64_t k = 0;
  Vec x;
  Vec x_c;
};

/// A_c = I_N (x) A - c L-hat (x) BK.
struct ClosedLoopMatrix {
  Mat matrix;
  CVec eigenvalues;
  /// rho(A - c lambda_i B K) for every nonzero Laplacian eigenvalue, in the
  /// order of GraphSpectrum::nonzero_eigenvalues().
  std::vector<double> mode_radii;
  /// All mode_radii < 1: the consensus condition on i = 2..N.
  bool consensus_modes_schur = false;

  double max_mode_radius() const;
};

/// rho(A - c lambda B K) for one (complex) Laplacian eigenvalue.
double mode_radius(const LtiModel& model, Complex lambda, const Mat& K, double c);

ClosedLoopMatrix assemble_closed_loop(const LtiModel& model, const GraphSpectrum& spectrum, const Mat& K, double c);

/// x(k+1) = (I (x) A) x + (I (x) B)(controls + actuator_injection), then
/// x_c(k+1) = x(k+1) + next_sensor_injection. Non-finite values propagate; use
/// DivergenceGuard to stop a run.
NetworkState step(const LtiModel& model, const NetworkState& state, const Vec& controls,
                  const Vec& actuator_injection, const Vec& next_sensor_injection);

/// Attack-free asymptote (r^T (x) A^k) x(0): every agent converges to A^k v0
/// with v0 = sum_i p_i x_i(0).
class ConsensusPrediction {
 public:
  /// Throws NumericalError when the graph has no spanning tree.
  ConsensusPrediction(const LtiModel& model, const GraphSpectrum& spectrum, const Vec& x0);

  const Vec& weighted_initial_state() const noexcept { return v0_; }
  Vec at(std::int64_t k) const;
  /// Values for k = 0..horizon-1, computed by repeated multiplication.
  std::vector<Vec> trajectory(std::int64_t horizon) const;

 private:
  Mat a_;
  Vec v0_;
};

ConsensusPrediction predict_consensus_value(const LtiModel& model, const GraphSpectrum& spectrum, const Vec& x0);

/// A run counts as destabilized once ||x||_inf exceeds the threshold or any
/// entry becomes non-finite.
struct DivergenceGuard {
  double threshold = 1e9;
  bool tripped(const Vec& x) const;
};

/// Agent i's block of a stacked vector.
inline auto agent_block(Vec& v, std::size_t i, std::size_t dim) {
  return v.segment(static_cast<Eigen::Index>(i * dim), static_cast<Eigen::Index>(dim));
}
inline auto agent_block(const Vec& v, std::size_t i, std::size_t dim) {
  return v.segment(static_cast<Eigen::Index>(i * dim), static_cast<Eigen::Index>(dim));
}

}  // namespace dmas
