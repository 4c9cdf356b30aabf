#pragma once

#include "dmas/graph.hpp"
#include "dmas/linalg.hpp"
#include "dmas/lti.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dmas {

// ---------------------------------------------------------------------------
// Discrete algebraic Riccati equation
//   A'PA - P - A'PB (R + B'PB)^{-1} B'PA + Q = 0
// ---------------------------------------------------------------------------

enum class DareMethod { FixedPoint, Doubling };

struct DareOptions {
  /// Relative step size at which the fixed-point iteration stops.
  double tol = 1e-12;
  int max_iter = 10000;
  /// Accepted solutions must satisfy ||residual||_F below this.
  double residual_tol = 1e-8;
  /// Skip straight to the doubling algorithm.
  bool force_doubling = false;
};

struct DareSolution {
  Mat P;
  int iterations = 0;
  double residual = 0.0;
  DareMethod method = DareMethod::FixedPoint;
};

double dare_residual(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& P);

/// Fixed-point iteration from P = Q, falling back to the structured doubling
/// algorithm if it has not converged within max_iter. Throws NumericalError
/// (with the last residual in the message) on failure and when R + B'PB is not
/// positive definite.
DareSolution solve_dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const DareOptions& opts = {});

struct GainDesign {
  Mat K;       ///< (R1 + B'P1B)^{-1} B'P1 A
  Mat P1;
  Mat R1_bar;  ///< R1 + B'P1B
  Mat T;       ///< K'B'P1BK
  DareSolution dare;
};

GainDesign design_gain(const LtiModel& model, const Mat& Q1, const Mat& R1, const DareOptions& opts = {});

// ---------------------------------------------------------------------------
// Coupling gain and compensator parameter
// ---------------------------------------------------------------------------

/// Open interval 2/lambda_m < c < 1 / (lambda_m sqrt(2 lambda_min(T Q1^{-1}))).
/// `upper` is +inf when lambda_min(T Q1^{-1}) is zero (rank-deficient T).
struct CouplingRange {
  double lower = 0.0;
  double upper = 0.0;
  double lambda_m = 0.0;
  double lambda_min_tq = 0.0;

  bool empty() const noexcept { return !(lower < upper); }
};

/// Throws NumericalError when lambda_m <= 1e-9 (no spanning tree).
CouplingRange coupling_range(const GraphSpectrum& spectrum, const Mat& T, const Mat& Q1);

/// lambda_min(c L-hat (x) B'P1B R1_bar^{-1}), smallest real part.
double compensator_coupling_term(const GraphSpectrum& spectrum, double c, const Mat& B, const Mat& P1,
                                 const Mat& R1_bar);

/// 1 / sqrt(2 + compensator_coupling_term).
double theta_bound(double coupling_term);

/// Worst-case spectral radius over nonzero lambda_i of the error/compensator
/// loop [[A - c lambda B K, -B], [theta c lambda K, theta I]]. The resilient
/// controller's disagreement dynamics are stable iff this is < 1.
double compensated_loop_radius(const LtiModel& model, const GraphSpectrum& spectrum, const Mat& K, double c,
                               double theta);

enum class GainSource { Riccati, Override };
enum class CouplingSource { RangeMidpoint, GridFallback, Override };
enum class ThetaSource { Default, BackedOff, Override };

const char* to_string(GainSource s);
const char* to_string(CouplingSource s);
const char* to_string(ThetaSource s);

struct ControllerConfig {
  Mat K;
  double c = 1.0;
  Mat Q1;
  Mat R1;
  Mat P1;
  Mat R1_bar;
  Mat T;
  double theta = 0.5;

  GainSource gain_source = GainSource::Riccati;
  CouplingSource coupling_source = CouplingSource::Override;
  ThetaSource theta_source = ThetaSource::Override;
  double dare_residual = 0.0;
  std::optional<CouplingRange> range;
  double coupling_term = 0.0;
  double theta_max = 0.0;
  /// c lies strictly inside the sufficient range.
  bool coupling_in_range = false;
  /// Every rho(A - c lambda_i B K) < 1.
  bool consensus_modes_schur = false;
  double max_mode_radius = 0.0;
  double compensated_radius = 0.0;
  /// Human-readable design remarks (fallbacks taken, bounds violated).
  std::vector<std::string> notes;
};

struct DesignRequest {
  Mat Q1;
  Mat R1;
  std::optional<Mat> K;
  std::optional<double> c;
  std::optional<double> theta;
  DareOptions dare;
};

/// Default c: midpoint of coupling_range when that is finite and makes every
/// consensus mode Schur, otherwise the grid value minimizing the worst mode
/// radius. Default theta: 0.9 theta_bound, reduced by factors of 0.9 until the
/// compensated loop is Schur. Throws NumericalError if no c on the grid
/// stabilizes the consensus modes.
ControllerConfig make_controller(const LtiModel& model, const GraphSpectrum& spectrum, const DesignRequest& req);

inline ClosedLoopMatrix assemble_closed_loop(const LtiModel& model, const GraphSpectrum& spectrum,
                                             const ControllerConfig& ctrl) {
  return assemble_closed_loop(model, spectrum, ctrl.K, ctrl.c);
}

inline CouplingRange coupling_range(const GraphSpectrum& spectrum, const ControllerConfig& ctrl) {
  return coupling_range(spectrum, ctrl.T, ctrl.Q1);
}

inline double theta_bound(const GraphSpectrum& spectrum, const ControllerConfig& ctrl, const Mat& B) {
  return theta_bound(compensator_coupling_term(spectrum, ctrl.c, B, ctrl.P1, ctrl.R1_bar));
}

}  // namespace dmas
