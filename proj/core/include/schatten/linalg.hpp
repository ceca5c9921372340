#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace schatten {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default budget for dense materialization (rows of the largest matrix).
inline constexpr Index kDefaultMaxDim = 8192;

/// Relative Hermiticity residual ||a - a*|| / ||a|| (Frobenius), 0 for a = 0.
double hermitian_residual(const CMatrix& a);

/// f(a) for Hermitian a via a full eigendecomposition. The input is
/// symmetrized first so that round-off in a does not leak into f(a).
CMatrix hermitian_function(const CMatrix& a, const std::function<double(double)>& f);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& a);

/// Largest singular value.
double operator_norm(const CMatrix& a);

}  // namespace schatten
