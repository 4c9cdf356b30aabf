#include "dmas/linalg.hpp"

#include "dmas/errors.hpp"

#include <cmath>

namespace dmas {

CVec eigenvalues(const Mat& m) {
  if (m.size() == 0) return CVec{};
  Eigen::EigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
  return solver.eigenvalues();
}

CVec eigenvalues(const CMat& m) {
  if (m.size() == 0) return CVec{};
  Eigen::ComplexEigenSolver<CMat> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("complex eigenvalue solver did not converge");
  return solver.eigenvalues();
}

double spectral_radius(const Mat& m) {
  const CVec ev = eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

double spectral_radius(const CMat& m) {
  const CVec ev = eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat matrix_power(const Mat& w, std::int64_t k) {
  if (w.rows() != w.cols()) throw DimensionError("matrix_power requires a square matrix");
  if (k < 0) throw std::invalid_argument("matrix_power requires k >= 0");
  Mat result = Mat::Identity(w.rows(), w.cols());
  Mat base = w;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool all_finite(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

}  // namespace dmas
