#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace dmas {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Thin wrappers over Eigen's dense solvers that throw NumericalError instead of
// returning garbage on non-convergence.
CVec eigenvalues(const Mat& m);
CVec eigenvalues(const CMat& m);

double spectral_radius(const Mat& m);
double spectral_radius(const CMat& m);

Mat kron(const Mat& a, const Mat& b);

/// W^k by repeated squaring.
Mat matrix_power(const Mat& w, std::int64_t k);

/// Largest absolute entry; 0 for empty vectors.
double inf_norm(const Vec& v);

/// True when every entry is finite.
bool all_finite(const Vec& v);

}  // namespace dmas
