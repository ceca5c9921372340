#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "schatten/coeff_algebra.hpp"
#include "schatten/linalg.hpp"
#include "schatten/multiindex.hpp"

namespace schatten {

/// Periodic box [-L/2, L/2)^N sampled with n points per axis (n even).
/// Points are stored row-major with the last axis fastest.
class TorusGrid {
 public:
  TorusGrid(int dimension, int points_per_axis, double side);

  int dimension() const noexcept { return dimension_; }
  int points_per_axis() const noexcept { return n_; }
  double side() const noexcept { return side_; }
  double spacing() const noexcept { return side_ / n_; }
  /// h^N, the quadrature weight of every sample.
  double cell_volume() const noexcept;
  /// n^N.
  std::size_t size() const noexcept { return size_; }

  std::vector<int> axis_indices(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> axis_indices) const;

  /// Sample coordinates, each in [-L/2, L/2).
  std::vector<double> point(std::size_t flat) const;
  /// Lattice frequency 2 pi k / L, k in {-n/2, ..., n/2 - 1}, at DFT slot `flat`.
  std::vector<double> frequency(std::size_t flat) const;
  /// Flat index of the periodic difference x_i - x_j.
  std::size_t difference_index(std::size_t i, std::size_t j) const;
  /// Minimum-image displacement from `center` to sample i.
  std::vector<double> displacement(std::size_t flat, std::span<const double> center) const;

  /// h^N sum_x u(x) conj(v(x)) over equally sized sample vectors.
  Complex inner(const CVector& u, const CVector& v) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int dimension_;
  int n_;
  double side_;
  std::size_t size_;
};

/// Samples of a scalar or nu-channel function on a grid, channel-major:
/// channel c occupies values[c * size, (c + 1) * size).
class GridFunction {
 public:
  GridFunction(TorusGrid grid, Index channels);
  GridFunction(TorusGrid grid, Index channels, CVector values);

  static GridFunction from(const TorusGrid& grid, const std::function<Complex(std::span<const double>)>& f);

  const TorusGrid& grid() const noexcept { return grid_; }
  Index channels() const noexcept { return channels_; }
  const CVector& values() const noexcept { return values_; }
  CVector& values() noexcept { return values_; }

  auto channel(Index c) { return values_.segment(c * grid_.size(), grid_.size()); }
  auto channel(Index c) const { return values_.segment(c * grid_.size(), grid_.size()); }

  Complex inner(const GridFunction& other) const;
  double norm() const;

 private:
  TorusGrid grid_;
  Index channels_;
  CVector values_;
};

/// A linear map between grid functions, applied matrix-free. Materialization
/// (see materialize) is always taken with respect to the point basis.
class LinearOperator {
 public:
  using Apply = std::function<CVector(const CVector&)>;

  LinearOperator(std::string name, TorusGrid grid, Index domain_channels,
                 Index codomain_channels, Apply apply, bool self_adjoint = false);

  const std::string& name() const noexcept { return name_; }
  const TorusGrid& grid() const noexcept { return grid_; }
  Index domain_channels() const noexcept { return domain_channels_; }
  Index codomain_channels() const noexcept { return codomain_channels_; }
  Index domain_dim() const noexcept;
  Index codomain_dim() const noexcept;
  bool self_adjoint() const noexcept { return self_adjoint_; }

  CVector apply(const CVector& u) const;
  GridFunction apply(const GridFunction& u) const;

 private:
  std::string name_;
  TorusGrid grid_;
  Index domain_channels_;
  Index codomain_channels_;
  Apply apply_;
  bool self_adjoint_;
};

/// Dense matrix whose columns are `op` applied to point-basis vectors.
/// Throws DimensionCap when either side exceeds `max_dim`.
CMatrix materialize(const LinearOperator& op, Index max_dim = kDefaultMaxDim);

/// Channel alpha of D_m u: inverse FFT of (i xi)^alpha u_hat.
GridFunction spectral_derivative_Dm(const GridFunction& u, const MultiIndexBasis& basis);

/// D_m as an operator from scalar to nu-channel functions, and its adjoint.
LinearOperator derivative_operator(const TorusGrid& grid, const MultiIndexBasis& basis);
LinearOperator derivative_adjoint(const TorusGrid& grid, const MultiIndexBasis& basis);

/// Pointwise multiplication v(x) -> M(x) v(x) on nu-channel functions.
LinearOperator pointwise_operator(const HermitianMatrixField& field, const TorusGrid& grid);

LinearOperator identity_operator(const TorusGrid& grid, Index channels);

/// H for constant a, as the Fourier multiplier A(xi) = <a xi^(m), xi^(m)>.
LinearOperator assemble_H_const(const HermitianMatrixField& a, const TorusGrid& grid);

/// H~ = D_m* a~ D_m through the FFT -> pointwise -> adjoint FFT pipeline.
/// Throws NonPositiveDefinite listing every bad sample.
LinearOperator assemble_H_var(const HermitianMatrixField& a_tilde, const TorusGrid& grid);

/// T = b D_m and F = T T* for a (constant or sampled) square-root field b.
LinearOperator assemble_T(const HermitianMatrixField& b, const TorusGrid& grid);
LinearOperator assemble_T_adjoint(const HermitianMatrixField& b, const TorusGrid& grid);
LinearOperator assemble_F(const HermitianMatrixField& b, const TorusGrid& grid);

/// Dense products with the block matrix of a pointwise field, applied without
/// forming it: rows (left) or columns (right) indexed channel-major.
CMatrix pointwise_left(const HermitianMatrixField& field, const TorusGrid& grid, const CMatrix& x);
CMatrix pointwise_right(const CMatrix& x, const HermitianMatrixField& field, const TorusGrid& grid);

/// A field of arbitrary (not necessarily Hermitian) nu x nu matrices.
CMatrix pointwise_left(std::span<const CMatrix> field, const TorusGrid& grid, const CMatrix& x);

}  // namespace schatten
