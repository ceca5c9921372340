#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "schatten/linalg.hpp"
#include "schatten/multiindex.hpp"

namespace schatten {

/// A nu x nu Hermitian coefficient matrix, either a single constant matrix or
/// one matrix per grid sample. Hermiticity is checked on construction; positive
/// definiteness is checked by the operations that need it.
class HermitianMatrixField {
 public:
  static HermitianMatrixField constant(MultiIndexBasis basis, CMatrix value);
  static HermitianMatrixField sampled(MultiIndexBasis basis, std::vector<CMatrix> samples);

  const MultiIndexBasis& basis() const noexcept { return basis_; }
  Index nu() const noexcept { return static_cast<Index>(basis_.size()); }
  bool is_constant() const noexcept { return constant_; }

  /// Number of stored matrices: 1 for a constant field.
  std::size_t sample_count() const noexcept { return samples_.size(); }

  /// Matrix at grid sample i; a constant field returns its value for every i.
  const CMatrix& at(std::size_t i) const { return constant_ ? samples_.front() : samples_.at(i); }
  const CMatrix& value() const;  // constant fields only
  const std::vector<CMatrix>& samples() const noexcept { return samples_; }

  /// Applies f to every matrix, keeping the constant/sampled kind.
  HermitianMatrixField transform(const std::function<CMatrix(const CMatrix&)>& f) const;

  /// Throws NonPositiveDefinite listing every sample whose smallest eigenvalue
  /// is <= 0.
  void require_positive_definite() const;

 private:
  HermitianMatrixField(MultiIndexBasis basis, bool constant, std::vector<CMatrix> samples);

  MultiIndexBasis basis_;
  bool constant_;
  std::vector<CMatrix> samples_;
};

/// Principal square root b of a Hermitian positive definite a (b*b = a).
/// Throws NonPositiveDefinite carrying the smallest eigenvalue otherwise.
CMatrix matrix_sqrt(const CMatrix& a);

/// a^{-1/2} for Hermitian positive definite a.
CMatrix matrix_inv_sqrt(const CMatrix& a);

/// Replaces every eigenvalue lambda by max(lo, min(lambda, hi)).
CMatrix clip_spectrum(const CMatrix& a, double lo, double hi);

/// Pointwise spectral clipping into [1/n, n]. Rejects n = 0.
HermitianMatrixField clip_coefficients(const HermitianMatrixField& a_tilde, int n);

/// Pointwise principal square root of a positive definite field.
HermitianMatrixField sqrt_field(const HermitianMatrixField& a);

/// a_{alpha beta} = delta_{alpha beta} m!/alpha!, whose symbol is |xi|^{2m}.
CMatrix polyharmonic_coefficients(const MultiIndexBasis& basis);

/// (xi^gamma)_gamma over the basis.
CVector monomial_vector(const MultiIndexBasis& basis, std::span<const double> xi);

/// (B(xi))_alpha = sum_gamma b_{alpha gamma} xi^gamma.
CVector symbol_B(const CMatrix& b, const MultiIndexBasis& basis, std::span<const double> xi);

/// A(xi) = |B(xi)|^2.
double principal_symbol_A(const CMatrix& b, const MultiIndexBasis& basis,
                          std::span<const double> xi);

/// g(A) A^{-1} B (x) B, the Fourier symbol of g(F). Zero at A = 0 since g(0) = 0.
CMatrix symbol_Lg(const CMatrix& b, const MultiIndexBasis& basis, std::span<const double> xi,
                  const std::function<double(double)>& g);

struct SymbolEvaluation {
  std::vector<double> xi;
  CVector B;
  double A = 0.0;
  std::optional<CMatrix> Lg;
};

SymbolEvaluation evaluate_symbol(const CMatrix& b, const MultiIndexBasis& basis,
                                 std::span<const double> xi,
                                 const std::function<double(double)>* g = nullptr);

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Half-width of a cube containing {A < 1}: sqrt(N) * lambda_min(a)^{-1/(2m)},
/// from A(xi) >= lambda_min(a) (|xi|^2 / N)^m.
double sublevel_box_radius(const CMatrix& b, const MultiIndexBasis& basis);

/// Monte Carlo estimate of vol{xi : A(xi) < 1} by uniform sampling of the
/// enclosing cube. The sample budget is split over a fixed number of seeded
/// streams, so the result depends only on (samples, seed), not on `threads`.
VolumeEstimate sublevel_volume(const CMatrix& b, const MultiIndexBasis& basis,
                               std::uint64_t samples, std::uint64_t seed,
                               unsigned threads = 1);

/// Volume of the unit ball in R^N.
double unit_ball_volume(int dimension);

/// c_cov(H) = (2 pi)^{-N} (N / 2m) vol{A < 1}.
double coarea_constant_from_volume(double volume, int dimension, int half_order);

/// c_cov(H) with the sublevel volume estimated by Monte Carlo; the standard
/// error is propagated linearly.
VolumeEstimate coarea_constant(const CMatrix& b, const MultiIndexBasis& basis,
                               std::uint64_t samples, std::uint64_t seed,
                               unsigned threads = 1);

}  // namespace schatten
