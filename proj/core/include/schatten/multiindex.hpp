#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace schatten {

/// Exponent vector of a mixed partial derivative D^alpha.
struct MultiIndex {
  std::vector<int> exponents;

  int order() const;
  std::size_t dimension() const { return exponents.size(); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All multi-indices of order m in N variables, in ascending lexicographic
/// order. Every nu-indexed vector or matrix in the library uses this order.
class MultiIndexBasis {
 public:
  MultiIndexBasis(int dimension, int half_order, std::vector<MultiIndex> entries);

  int dimension() const noexcept { return dimension_; }
  int half_order() const noexcept { return half_order_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<MultiIndex>& entries() const noexcept { return entries_; }

  /// Position of `alpha` in the basis; throws InvalidArgument if absent.
  std::size_t index_of(const MultiIndex& alpha) const;

  /// alpha! = prod_i alpha_i!
  static double factorial(const MultiIndex& alpha);

  friend bool operator==(const MultiIndexBasis&, const MultiIndexBasis&) = default;

 private:
  int dimension_;
  int half_order_;
  std::vector<MultiIndex> entries_;
};

/// Binomial coefficient C(n, k) in exact integer arithmetic.
std::size_t binomial(std::size_t n, std::size_t k);

/// nu(m, N) = C(N + m - 1, N - 1).
std::size_t basis_size(int dimension, int half_order);

/// Rejects dimension < 1 or half_order < 1 with InvalidArgument.
MultiIndexBasis enumerate_basis(int dimension, int half_order);

/// xi^gamma = prod_i xi_i^{gamma_i}, with 0^0 = 1.
double monomial(std::span<const double> xi, const MultiIndex& gamma);
std::complex<double> monomial(std::span<const std::complex<double>> xi, const MultiIndex& gamma);

}  // namespace schatten
