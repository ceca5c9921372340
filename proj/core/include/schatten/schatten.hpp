#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "schatten/coeff_algebra.hpp"
#include "schatten/linalg.hpp"
#include "schatten/torus.hpp"

namespace schatten {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Singular values, non-increasing.
struct SingularSpectrum {
  std::vector<double> values;
  Index rows = 0;
  Index cols = 0;
};

SingularSpectrum singular_spectrum(const CMatrix& m);

/// (sum_j s_j^p)^{1/p}; p = kInfinity gives s_1. Rejects p < 1.
double schatten_norm(const SingularSpectrum& s, double p);
double schatten_norm(const CMatrix& m, double p);

/// (op + I)^{-1} of a dense self-adjoint PSD matrix.
CMatrix resolvent(const CMatrix& op);
CMatrix resolvent(const LinearOperator& op, Index max_dim = kDefaultMaxDim);

/// || (S*S + I)^{-1} + S*(SS* + I)^{-1} S - I ||, operator norm.
double deift_residual(const CMatrix& s);

/// Dense objects shared by the identity checks for one pair (a, a~).
struct ResolventPair {
  TorusGrid grid;
  MultiIndexBasis basis;
  CMatrix H;
  CMatrix H_tilde;
  CMatrix R;        // (H + I)^{-1}
  CMatrix R_tilde;  // (H~ + I)^{-1}
  CMatrix difference() const { return R_tilde - R; }
};

/// Materializes H (multiplier route) and H~ (pipeline route) and their resolvents.
ResolventPair assemble_resolvents(const HermitianMatrixField& a, const HermitianMatrixField& a_tilde,
                                  const TorusGrid& grid, Index max_dim = kDefaultMaxDim);

/// D_m* a~^{1/2} (F~+I)^{-1} a~^{-1/2} (a - a~) a^{-1/2} (F+I)^{-1} a^{1/2} D_m,
/// evaluated densely from the coefficient side only.
CMatrix factorization_chain(const HermitianMatrixField& a, const HermitianMatrixField& a_tilde,
                            const TorusGrid& grid, Index max_dim = kDefaultMaxDim);

/// ||direct - chain|| / ||direct|| (operator norm); the absolute residual when
/// the direct difference vanishes.
double factorization_residual(const CMatrix& direct, const CMatrix& chain);
double factorization_residual(const HermitianMatrixField& a, const HermitianMatrixField& a_tilde,
                              const TorusGrid& grid, Index max_dim = kDefaultMaxDim);

struct PolarCheck {
  double factor_residual = 0.0;    // ||a^{1/2} D_m - F^{1/2} U||
  double isometry_residual = 0.0;  // ||U U* U - U||
  CMatrix U;                       // partial isometry, (nu n^N) x n^N
  CMatrix F_sqrt;
  CMatrix S;                       // a^{1/2} D_m
};

/// Polar decomposition of a^{1/2} D_m: U from the SVD with the kernel of
/// a^{1/2} D_m removed, F^{1/2} from the eigendecomposition of F = S S*.
PolarCheck polar_isometry_check(const HermitianMatrixField& a, const TorusGrid& grid,
                                Index max_dim = kDefaultMaxDim);

/// Translation-invariant kernel of g(F): one nu x nu matrix per periodic
/// difference z, k_g(z) = L^{-N} sum_k Lg(xi_k) e^{i xi_k z}.
struct MatrixKernel {
  TorusGrid grid;
  std::vector<CMatrix> values;
};

MatrixKernel kernel_of_gF(const CMatrix& b, const MultiIndexBasis& basis, const TorusGrid& grid,
                          const std::function<double(double)>& g);

/// Dense matrix of V g(F) assembled from the kernel: block (x, y) is
/// V(x) k_g(x - y) h^N, rows and columns channel-major.
CMatrix kernel_operator_matrix(std::span<const CMatrix> v, const MatrixKernel& kernel);

/// (h^{2N} sum_{x,y} |V(x) k_g(x - y)|_F^2)^{1/2}.
double kernel_hilbert_schmidt_norm(std::span<const CMatrix> v, const MatrixKernel& kernel);

/// One instance of an inequality lhs <= constant * rhs.
struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double ratio = 0.0;
  std::string context;
};

/// Absolute level below which a left-hand side counts as zero.
inline constexpr double kRoundoffFloor = 1e-12;

/// ratio = lhs / (constant * rhs); a vanishing denominator gives 0 when
/// lhs <= kRoundoffFloor and inf otherwise.
double bound_ratio(double lhs, double constant, double rhs);

/// ||(H~+I)^{-1} - (H+I)^{-1}|| against (1/4) v_inf.
BoundCheck operator_norm_bound_check(const CMatrix& H_tilde, const CMatrix& H, double v_inf);

}  // namespace schatten
