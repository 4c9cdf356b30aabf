#include "dmas/control_design.hpp"

#include "dmas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dmas {

namespace {

void check_design_inputs(const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
  if (A.rows() != A.cols()) throw DimensionError("A must be square");
  if (B.rows() != A.rows()) throw DimensionError("B must have as many rows as A");
  if (Q.rows() != A.rows() || Q.cols() != A.cols()) throw DimensionError("Q1 must be n x n");
  if (R.rows() != B.cols() || R.cols() != B.cols()) throw DimensionError("R1 must be m x m");
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

// R + B'PB, checked positive definite.
Eigen::LDLT<Mat> factor_rbar(const Mat& B, const Mat& R, const Mat& P) {
  const Mat rbar = symmetrize(R + B.transpose() * P * B);
  Eigen::LLT<Mat> llt(rbar);
  if (llt.info() != Eigen::Success) throw NumericalError("R1 + B'P1B is not positive definite");
  return Eigen::LDLT<Mat>(rbar);
}

Mat riccati_map(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& P) {
  const auto rbar = factor_rbar(B, R, P);
  const Mat bpa = B.transpose() * P * A;
  return symmetrize(A.transpose() * P * A - bpa.transpose() * rbar.solve(bpa) + Q);
}

std::optional<DareSolution> fixed_point(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                                        const DareOptions& opts) {
  Mat P = symmetrize(Q);
  for (int it = 1; it <= opts.max_iter; ++it) {
    Mat next = riccati_map(A, B, Q, R, P);
    if (!next.allFinite()) return std::nullopt;
    const double delta = (next - P).norm();
    P = std::move(next);
    if (delta <= opts.tol * std::max(1.0, P.norm())) {
      return DareSolution{P, it, dare_residual(A, B, Q, R, P), DareMethod::FixedPoint};
    }
  }
  return std::nullopt;
}

// Structured doubling for X = A'X(I + GX)^{-1}A + H, G = B R^{-1} B', H = Q.
DareSolution doubling(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const DareOptions& opts) {
  const auto n = A.rows();
  const Mat I = Mat::Identity(n, n);
  Mat Ak = A;
  Mat Gk = B * R.ldlt().solve(B.transpose());
  Mat Hk = symmetrize(Q);
  int it = 0;
  for (; it < 200; ++it) {
    Eigen::PartialPivLU<Mat> lu(I + Gk * Hk);
    const Mat inv_a = lu.solve(Ak);
    const Mat inv_g = lu.solve(Gk);
    const Mat Hn = symmetrize(Hk + Ak.transpose() * Hk * inv_a);
    const Mat Gn = symmetrize(Gk + Ak * inv_g * Ak.transpose());
    const Mat An = Ak * inv_a;
    if (!Hn.allFinite() || !Gn.allFinite() || !An.allFinite()) break;
    const double delta = (Hn - Hk).norm();
    Ak = An;
    Gk = Gn;
    Hk = Hn;
    if (delta <= opts.tol * std::max(1.0, Hk.norm())) {
      ++it;
      break;
    }
  }
  return DareSolution{Hk, it, dare_residual(A, B, Q, R, Hk), DareMethod::Doubling};
}

}  // namespace

double dare_residual(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& P) {
  const auto rbar = factor_rbar(B, R, P);
  const Mat bpa = B.transpose() * P * A;
  return (A.transpose() * P * A - P - bpa.transpose() * rbar.solve(bpa) + Q).norm();
}

DareSolution solve_dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const DareOptions& opts) {
  check_design_inputs(A, B, Q, R);
  if (Eigen::LLT<Mat>(symmetrize(Q)).info() != Eigen::Success) throw NumericalError("Q1 must be positive definite");
  if (Eigen::LLT<Mat>(symmetrize(R)).info() != Eigen::Success) throw NumericalError("R1 must be positive definite");

  double last_residual = std::numeric_limits<double>::infinity();
  if (!opts.force_doubling) {
    if (auto sol = fixed_point(A, B, Q, R, opts)) {
      if (sol->residual < opts.residual_tol) return *sol;
      last_residual = sol->residual;
    }
  }
  DareSolution sol = doubling(A, B, Q, R, opts);
  if (std::isfinite(sol.residual) && sol.residual < opts.residual_tol) return sol;
  if (std::isfinite(sol.residual)) last_residual = std::min(last_residual, sol.residual);
  std::ostringstream msg;
  msg << "Riccati solver did not converge (last residual " << last_residual << ")";
  throw NumericalError(msg.str());
}

GainDesign design_gain(const LtiModel& model, const Mat& Q1, const Mat& R1, const DareOptions& opts) {
  const Mat& A = model.A();
  const Mat& B = model.B();
  GainDesign g;
  g.dare = solve_dare(A, B, Q1, R1, opts);
  g.P1 = g.dare.P;
  g.R1_bar = symmetrize(R1 + B.transpose() * g.P1 * B);
  g.K = g.R1_bar.ldlt().solve(B.transpose() * g.P1 * A);
  g.T = g.K.transpose() * B.transpose() * g.P1 * B * g.K;
  return g;
}

CouplingRange coupling_range(const GraphSpectrum& spectrum, const Mat& T, const Mat& Q1) {
  CouplingRange r;
  r.lambda_m = spectrum.min_nonzero_real_part();
  if (!(r.lambda_m > 1e-9))
    throw NumericalError("smallest nonzero Laplacian eigenvalue has nonpositive real part; no spanning tree");
  const CVec ev = eigenvalues(Mat(T * Q1.inverse()));
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) lo = std::min(lo, ev[i].real());
  r.lambda_min_tq = std::max(lo, 0.0);
  r.lower = 2.0 / r.lambda_m;
  r.upper = r.lambda_min_tq > 0.0 ? 1.0 / (r.lambda_m * std::sqrt(2.0 * r.lambda_min_tq))
                                  : std::numeric_limits<double>::infinity();
  return r;
}

double compensator_coupling_term(const GraphSpectrum& spectrum, double c, const Mat& B, const Mat& P1,
                                 const Mat& R1_bar) {
  const Mat inner = B.transpose() * P1 * B * R1_bar.inverse();
  const CVec ev = eigenvalues(Mat(kron(c * spectrum.normalized_laplacian, inner)));
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) lo = std::min(lo, ev[i].real());
  return lo;
}

double theta_bound(double coupling_term) {
  const double s = 2.0 + coupling_term;
  if (!(s > 0.0)) throw NumericalError("compensator bound undefined: 2 + lambda_min term is not positive");
  return 1.0 / std::sqrt(s);
}

double compensated_loop_radius(const LtiModel& model, const GraphSpectrum& spectrum, const Mat& K, double c,
                               double theta) {
  const auto n = static_cast<Eigen::Index>(model.state_dim());
  const auto m = static_cast<Eigen::Index>(model.input_dim());
  const CMat A = model.A().cast<Complex>();
  const CMat B = model.B().cast<Complex>();
  const CMat Kc = K.cast<Complex>();
  double worst = 0.0;
  for (const Complex& l : spectrum.nonzero_eigenvalues()) {
    CMat M(n + m, n + m);
    M.topLeftCorner(n, n) = A - (c * l) * B * Kc;
    M.topRightCorner(n, m) = -B;
    M.bottomLeftCorner(m, n) = (theta * c * l) * Kc;
    M.bottomRightCorner(m, m) = theta * CMat::Identity(m, m);
    worst = std::max(worst, spectral_radius(M));
  }
  return worst;
}

const char* to_string(GainSource s) { return s == GainSource::Riccati ? "riccati" : "override"; }

const char* to_string(CouplingSource s) {
  switch (s) {
    case CouplingSource::RangeMidpoint: return "range_midpoint";
    case CouplingSource::GridFallback: return "grid_fallback";
    case CouplingSource::Override: return "override";
  }
  return "?";
}

const char* to_string(ThetaSource s) {
  switch (s) {
    case ThetaSource::Default: return "default";
    case ThetaSource::BackedOff: return "backed_off";
    case ThetaSource::Override: return "override";
  }
  return "?";
}

namespace {

// Back-off target for the default theta: radius near 1 means very slow settling.
constexpr double kCompensatedRadiusTarget = 0.95;

double worst_mode_radius(const LtiModel& model, const GraphSpectrum& spectrum, const Mat& K, double c) {
  double worst = 0.0;
  for (const Complex& l : spectrum.nonzero_eigenvalues()) worst = std::max(worst, mode_radius(model, l, K, c));
  return worst;
}

constexpr int kCouplingGridPoints = 2000;

}  // namespace

ControllerConfig make_controller(const LtiModel& model, const GraphSpectrum& spectrum, const DesignRequest& req) {
  ControllerConfig ctrl;
  ctrl.Q1 = req.Q1;
  ctrl.R1 = req.R1;
  const GainDesign g = design_gain(model, req.Q1, req.R1, req.dare);
  ctrl.P1 = g.P1;
  ctrl.R1_bar = g.R1_bar;
  ctrl.dare_residual = g.dare.residual;
  if (req.K) {
    if (req.K->rows() != static_cast<Eigen::Index>(model.input_dim()) ||
        req.K->cols() != static_cast<Eigen::Index>(model.state_dim()))
      throw DimensionError("gain override K must be input_dim x state_dim");
    ctrl.K = *req.K;
    ctrl.gain_source = GainSource::Override;
  } else {
    ctrl.K = g.K;
    ctrl.gain_source = GainSource::Riccati;
  }
  ctrl.T = ctrl.K.transpose() * model.B().transpose() * ctrl.P1 * model.B() * ctrl.K;

  try {
    ctrl.range = coupling_range(spectrum, ctrl.T, ctrl.Q1);
  } catch (const NumericalError&) {
    if (!req.c) throw;
  }

  if (req.c) {
    if (!(*req.c > 0.0)) throw NumericalError("coupling gain c must be positive");
    ctrl.c = *req.c;
    ctrl.coupling_source = CouplingSource::Override;
  } else {
    const CouplingRange& r = *ctrl.range;
    bool chosen = false;
    if (!r.empty() && std::isfinite(r.upper)) {
      const double mid = 0.5 * (r.lower + r.upper);
      if (worst_mode_radius(model, spectrum, ctrl.K, mid) < 1.0) {
        ctrl.c = mid;
        ctrl.coupling_source = CouplingSource::RangeMidpoint;
        chosen = true;
      } else {
        ctrl.notes.push_back("coupling range midpoint does not make A - c lambda_i B K Schur; using grid fallback");
      }
    } else if (r.empty()) {
      ctrl.notes.push_back("sufficient coupling range is empty; using grid fallback");
    } else {
      ctrl.notes.push_back("sufficient coupling range is unbounded above; using grid fallback");
    }
    if (!chosen) {
      double min_abs = std::numeric_limits<double>::infinity();
      for (const Complex& l : spectrum.nonzero_eigenvalues()) min_abs = std::min(min_abs, std::abs(l));
      const double c_max = 4.0 / min_abs;
      double best_c = 0.0;
      double best_r = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= kCouplingGridPoints; ++j) {
        const double c = c_max * j / kCouplingGridPoints;
        const double rad = worst_mode_radius(model, spectrum, ctrl.K, c);
        if (rad < best_r) {
          best_r = rad;
          best_c = c;
        }
      }
      if (!(best_r < 1.0)) throw NumericalError("no coupling gain on the search grid stabilizes the consensus modes");
      ctrl.c = best_c;
      ctrl.coupling_source = CouplingSource::GridFallback;
    }
  }
  ctrl.coupling_in_range = ctrl.range && ctrl.c > ctrl.range->lower && ctrl.c < ctrl.range->upper;
  ctrl.max_mode_radius = worst_mode_radius(model, spectrum, ctrl.K, ctrl.c);
  ctrl.consensus_modes_schur = ctrl.max_mode_radius < 1.0;
  if (!ctrl.consensus_modes_schur) ctrl.notes.push_back("A - c lambda_i B K is not Schur for every nonzero lambda_i");

  ctrl.coupling_term = compensator_coupling_term(spectrum, ctrl.c, model.B(), ctrl.P1, ctrl.R1_bar);
  ctrl.theta_max = theta_bound(ctrl.coupling_term);
  if (req.theta) {
    if (!(*req.theta > 0.0)) throw NumericalError("compensator parameter theta must be positive");
    ctrl.theta = *req.theta;
    ctrl.theta_source = ThetaSource::Override;
    if (ctrl.theta >= ctrl.theta_max) ctrl.notes.push_back("theta is not below the compensator bound");
  } else {
    ctrl.theta = 0.9 * ctrl.theta_max;
    ctrl.theta_source = ThetaSource::Default;
    while (compensated_loop_radius(model, spectrum, ctrl.K, ctrl.c, ctrl.theta) > kCompensatedRadiusTarget &&
           ctrl.theta > 1e-3 * ctrl.theta_max) {
      ctrl.theta *= 0.9;
      ctrl.theta_source = ThetaSource::BackedOff;
    }
    if (ctrl.theta_source == ThetaSource::BackedOff)
      ctrl.notes.push_back("theta reduced below 0.9 * bound so the compensated loop radius is at most 0.95");
  }
  ctrl.compensated_radius = compensated_loop_radius(model, spectrum, ctrl.K, ctrl.c, ctrl.theta);
  if (ctrl.compensated_radius >= 1.0) ctrl.notes.push_back("compensated error loop is not Schur at this theta");
  return ctrl;
}

}  // namespace dmas
