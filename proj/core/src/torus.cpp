#include "schatten/torus.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "fft.hpp"
#include "schatten/errors.hpp"

namespace schatten {

TorusGrid::TorusGrid(int dimension, int points_per_axis, double side)
    : dimension_(dimension), n_(points_per_axis), side_(side), size_(1) {
  if (dimension < 1) throw InvalidArgument("grid dimension must be >= 1");
  if (points_per_axis < 2 || points_per_axis % 2 != 0)
    throw InvalidArgument("points per axis must be even and >= 2, got " + std::to_string(points_per_axis));
  if (!(side > 0.0) || !std::isfinite(side)) throw InvalidArgument("box side must be positive");
  for (int d = 0; d < dimension; ++d) size_ *= static_cast<std::size_t>(points_per_axis);
}

double TorusGrid::cell_volume() const noexcept { return std::pow(spacing(), dimension_); }

std::vector<int> TorusGrid::axis_indices(std::size_t flat) const {
  std::vector<int> idx(static_cast<std::size_t>(dimension_));
  for (int d = dimension_ - 1; d >= 0; --d) {
    idx[static_cast<std::size_t>(d)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
  return idx;
}

std::size_t TorusGrid::flat_index(std::span<const int> axis_indices) const {
  std::size_t flat = 0;
  for (int j : axis_indices) {
    const int wrapped = ((j % n_) + n_) % n_;
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(wrapped);
  }
  return flat;
}

std::vector<double> TorusGrid::point(std::size_t flat) const {
  auto idx = axis_indices(flat);
  std::vector<double> x(idx.size());
  for (std::size_t d = 0; d < idx.size(); ++d) x[d] = -0.5 * side_ + idx[d] * spacing();
  return x;
}

std::vector<double> TorusGrid::frequency(std::size_t flat) const {
  auto idx = axis_indices(flat);
  std::vector<double> xi(idx.size());
  for (std::size_t d = 0; d < idx.size(); ++d) {
    const int k = idx[d] < n_ / 2 ? idx[d] : idx[d] - n_;
    xi[d] = 2.0 * std::numbers::pi * k / side_;
  }
  return xi;
}

std::size_t TorusGrid::difference_index(std::size_t i, std::size_t j) const {
  auto a = axis_indices(i);
  auto b = axis_indices(j);
  for (std::size_t d = 0; d < a.size(); ++d) a[d] -= b[d];
  return flat_index(a);
}

std::vector<double> TorusGrid::displacement(std::size_t flat, std::span<const double> center) const {
  auto x = point(flat);
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double c = d < center.size() ? center[d] : 0.0;
    double r = std::fmod(x[d] - c + 0.5 * side_, side_);
    if (r < 0) r += side_;
    x[d] = r - 0.5 * side_;
  }
  return x;
}

Complex TorusGrid::inner(const CVector& u, const CVector& v) const {
  if (u.size() != v.size()) throw InvalidArgument("inner product of vectors of different length");
  // v.dot(u) = sum conj(v) u
  return cell_volume() * v.dot(u);
}

GridFunction::GridFunction(TorusGrid grid, Index channels)
    : grid_(std::move(grid)), channels_(channels),
      values_(CVector::Zero(channels * static_cast<Index>(grid_.size()))) {}

GridFunction::GridFunction(TorusGrid grid, Index channels, CVector values)
    : grid_(std::move(grid)), channels_(channels), values_(std::move(values)) {
  if (values_.size() != channels_ * static_cast<Index>(grid_.size()))
    throw InvalidArgument("grid function has wrong number of samples");
}

GridFunction GridFunction::from(const TorusGrid& grid,
                                const std::function<Complex(std::span<const double>)>& f) {
  GridFunction u(grid, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) u.values_(static_cast<Index>(i)) = f(grid.point(i));
  return u;
}

Complex GridFunction::inner(const GridFunction& other) const { return grid_.inner(values_, other.values_); }

double GridFunction::norm() const { return std::sqrt(grid_.cell_volume()) * values_.norm(); }

LinearOperator::LinearOperator(std::string name, TorusGrid grid, Index domain_channels,
                               Index codomain_channels, Apply apply, bool self_adjoint)
    : name_(std::move(name)), grid_(std::move(grid)), domain_channels_(domain_channels),
      codomain_channels_(codomain_channels), apply_(std::move(apply)), self_adjoint_(self_adjoint) {}

Index LinearOperator::domain_dim() const noexcept {
  return domain_channels_ * static_cast<Index>(grid_.size());
}

Index LinearOperator::codomain_dim() const noexcept {
  return codomain_channels_ * static_cast<Index>(grid_.size());
}

CVector LinearOperator::apply(const CVector& u) const {
  if (u.size() != domain_dim())
    throw InvalidArgument(name_ + ": input has " + std::to_string(u.size()) + " samples, expected " +
                          std::to_string(domain_dim()));
  return apply_(u);
}

GridFunction LinearOperator::apply(const GridFunction& u) const {
  if (!(u.grid() == grid_) || u.channels() != domain_channels_)
    throw InvalidArgument(name_ + ": grid function does not match the operator domain");
  return GridFunction(grid_, codomain_channels_, apply(u.values()));
}

CMatrix materialize(const LinearOperator& op, Index max_dim) {
  const Index rows = op.codomain_dim();
  const Index cols = op.domain_dim();
  const Index biggest = std::max(rows, cols);
  if (biggest > max_dim)
    throw DimensionCap(static_cast<std::size_t>(biggest), static_cast<std::size_t>(max_dim));
  CMatrix m(rows, cols);
  CVector e = CVector::Zero(cols);
  for (Index j = 0; j < cols; ++j) {
    e(j) = 1.0;
    m.col(j) = op.apply(e);
    e(j) = 0.0;
  }
  return m;
}

namespace {

using Multipliers = std::vector<CVector>;

// (i xi)^alpha per basis entry, over the DFT slots of the grid.
std::shared_ptr<const Multipliers> derivative_symbols(const TorusGrid& grid, const MultiIndexBasis& basis) {
  if (basis.dimension() != grid.dimension()) throw InvalidArgument("basis and grid dimensions differ");
  auto out = std::make_shared<Multipliers>(basis.size(), CVector(static_cast<Index>(grid.size())));
  std::vector<Complex> ixi(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto xi = grid.frequency(k);
    for (std::size_t d = 0; d < xi.size(); ++d) ixi[d] = Complex(0.0, xi[d]);
    for (std::size_t a = 0; a < basis.size(); ++a) (*out)[a](static_cast<Index>(k)) = monomial(ixi, basis[a]);
  }
  return out;
}

CVector forward(const TorusGrid& grid, const auto& in) {
  CVector out(static_cast<Index>(grid.size()));
  CVector tmp = in;
  detail::fft_forward(grid, {tmp.data(), grid.size()}, {out.data(), grid.size()});
  return out;
}

CVector inverse(const TorusGrid& grid, const CVector& in) {
  CVector out(static_cast<Index>(grid.size()));
  detail::fft_inverse(grid, {in.data(), grid.size()}, {out.data(), grid.size()});
  return out;
}

CVector apply_derivative(const TorusGrid& grid, const Multipliers& sym, const CVector& u) {
  const auto M = static_cast<Index>(grid.size());
  const CVector uh = forward(grid, u);
  CVector out(static_cast<Index>(sym.size()) * M);
  for (std::size_t a = 0; a < sym.size(); ++a)
    out.segment(static_cast<Index>(a) * M, M) = inverse(grid, uh.cwiseProduct(sym[a]));
  return out;
}

CVector apply_derivative_adjoint(const TorusGrid& grid, const Multipliers& sym, const CVector& v) {
  const auto M = static_cast<Index>(grid.size());
  CVector acc = CVector::Zero(M);
  for (std::size_t a = 0; a < sym.size(); ++a)
    acc += sym[a].conjugate().cwiseProduct(forward(grid, v.segment(static_cast<Index>(a) * M, M)));
  return inverse(grid, acc);
}

CVector apply_pointwise(const std::vector<CMatrix>& field, Index nu, Index M, const CVector& v) {
  CVector out(nu * M);
  CVector local(nu);
  const bool constant = field.size() == 1;
  for (Index x = 0; x < M; ++x) {
    for (Index b = 0; b < nu; ++b) local(b) = v(b * M + x);
    const CMatrix& mat = constant ? field.front() : field[static_cast<std::size_t>(x)];
    const CVector r = mat * local;
    for (Index a = 0; a < nu; ++a) out(a * M + x) = r(a);
  }
  return out;
}

void require_field_on_grid(const HermitianMatrixField& field, const TorusGrid& grid) {
  if (field.basis().dimension() != grid.dimension()) throw InvalidArgument("field and grid dimensions differ");
  if (!field.is_constant() && field.sample_count() != grid.size())
    throw InvalidArgument("sampled field has " + std::to_string(field.sample_count()) +
                          " samples, grid has " + std::to_string(grid.size()));
}

}  // namespace

GridFunction spectral_derivative_Dm(const GridFunction& u, const MultiIndexBasis& basis) {
  if (u.channels() != 1) throw InvalidArgument("D_m acts on scalar grid functions");
  const auto sym = derivative_symbols(u.grid(), basis);
  return GridFunction(u.grid(), static_cast<Index>(basis.size()), apply_derivative(u.grid(), *sym, u.values()));
}

LinearOperator derivative_operator(const TorusGrid& grid, const MultiIndexBasis& basis) {
  auto sym = derivative_symbols(grid, basis);
  return LinearOperator("D_m", grid, 1, static_cast<Index>(basis.size()),
                        [grid, sym](const CVector& u) { return apply_derivative(grid, *sym, u); });
}

LinearOperator derivative_adjoint(const TorusGrid& grid, const MultiIndexBasis& basis) {
  auto sym = derivative_symbols(grid, basis);
  return LinearOperator("D_m*", grid, static_cast<Index>(basis.size()), 1,
                        [grid, sym](const CVector& v) { return apply_derivative_adjoint(grid, *sym, v); });
}

LinearOperator pointwise_operator(const HermitianMatrixField& field, const TorusGrid& grid) {
  require_field_on_grid(field, grid);
  const Index nu = field.nu();
  const auto M = static_cast<Index>(grid.size());
  auto samples = std::make_shared<const std::vector<CMatrix>>(field.samples());
  return LinearOperator("pointwise", grid, nu, nu,
                        [samples, nu, M](const CVector& v) { return apply_pointwise(*samples, nu, M, v); },
                        true);
}

LinearOperator identity_operator(const TorusGrid& grid, Index channels) {
  return LinearOperator("I", grid, channels, channels, [](const CVector& v) { return v; }, true);
}

LinearOperator assemble_H_const(const HermitianMatrixField& a, const TorusGrid& grid) {
  if (!a.is_constant()) throw InvalidArgument("assemble_H_const needs a constant coefficient matrix");
  require_field_on_grid(a, grid);
  a.require_positive_definite();
  const auto sym = derivative_symbols(grid, a.basis());
  const auto M = static_cast<Index>(grid.size());
  const Index nu = a.nu();
  auto multiplier = std::make_shared<CVector>(M);
  CVector w(nu);
  for (Index k = 0; k < M; ++k) {
    for (Index j = 0; j < nu; ++j) w(j) = (*sym)[static_cast<std::size_t>(j)](k);
    // <a w, w>; real for Hermitian a
    (*multiplier)(k) = Complex(w.dot(a.value() * w).real(), 0.0);
  }
  return LinearOperator("H", grid, 1, 1,
                        [grid, multiplier](const CVector& u) {
                          return inverse(grid, forward(grid, u).cwiseProduct(*multiplier));
                        },
                        true);
}

LinearOperator assemble_H_var(const HermitianMatrixField& a_tilde, const TorusGrid& grid) {
  require_field_on_grid(a_tilde, grid);
  a_tilde.require_positive_definite();
  auto sym = derivative_symbols(grid, a_tilde.basis());
  auto samples = std::make_shared<const std::vector<CMatrix>>(a_tilde.samples());
  const Index nu = a_tilde.nu();
  const auto M = static_cast<Index>(grid.size());
  return LinearOperator("H~", grid, 1, 1,
                        [grid, sym, samples, nu, M](const CVector& u) {
                          const CVector du = apply_derivative(grid, *sym, u);
                          return apply_derivative_adjoint(grid, *sym, apply_pointwise(*samples, nu, M, du));
                        },
                        true);
}

LinearOperator assemble_T(const HermitianMatrixField& b, const TorusGrid& grid) {
  require_field_on_grid(b, grid);
  auto sym = derivative_symbols(grid, b.basis());
  auto samples = std::make_shared<const std::vector<CMatrix>>(b.samples());
  const Index nu = b.nu();
  const auto M = static_cast<Index>(grid.size());
  return LinearOperator("T", grid, 1, nu, [grid, sym, samples, nu, M](const CVector& u) {
    return apply_pointwise(*samples, nu, M, apply_derivative(grid, *sym, u));
  });
}

LinearOperator assemble_T_adjoint(const HermitianMatrixField& b, const TorusGrid& grid) {
  require_field_on_grid(b, grid);
  auto sym = derivative_symbols(grid, b.basis());
  auto samples = std::make_shared<const std::vector<CMatrix>>(b.samples());
  const Index nu = b.nu();
  const auto M = static_cast<Index>(grid.size());
  return LinearOperator("T*", grid, nu, 1, [grid, sym, samples, nu, M](const CVector& v) {
    return apply_derivative_adjoint(grid, *sym, apply_pointwise(*samples, nu, M, v));
  });
}

LinearOperator assemble_F(const HermitianMatrixField& b, const TorusGrid& grid) {
  require_field_on_grid(b, grid);
  auto sym = derivative_symbols(grid, b.basis());
  auto samples = std::make_shared<const std::vector<CMatrix>>(b.samples());
  const Index nu = b.nu();
  const auto M = static_cast<Index>(grid.size());
  return LinearOperator("F", grid, nu, nu,
                        [grid, sym, samples, nu, M](const CVector& v) {
                          const CVector tv = apply_derivative_adjoint(grid, *sym, apply_pointwise(*samples, nu, M, v));
                          return apply_pointwise(*samples, nu, M, apply_derivative(grid, *sym, tv));
                        },
                        true);
}

CMatrix pointwise_left(std::span<const CMatrix> field, const TorusGrid& grid, const CMatrix& x) {
  const auto M = static_cast<Index>(grid.size());
  if (field.empty()) throw InvalidArgument("empty field");
  const Index nu = field.front().rows();
  if (x.rows() != nu * M) throw InvalidArgument("pointwise_left: row count does not match the field");
  const bool constant = field.size() == 1;
  if (!constant && field.size() != grid.size()) throw InvalidArgument("pointwise_left: field size mismatch");
  CMatrix out(x.rows(), x.cols());
  CMatrix block(nu, x.cols());
  for (Index p = 0; p < M; ++p) {
    for (Index b = 0; b < nu; ++b) block.row(b) = x.row(b * M + p);
    const CMatrix& mat = constant ? field.front() : field[static_cast<std::size_t>(p)];
    const CMatrix r = mat * block;
    for (Index a = 0; a < nu; ++a) out.row(a * M + p) = r.row(a);
  }
  return out;
}

CMatrix pointwise_left(const HermitianMatrixField& field, const TorusGrid& grid, const CMatrix& x) {
  require_field_on_grid(field, grid);
  return pointwise_left(std::span<const CMatrix>(field.samples()), grid, x);
}

CMatrix pointwise_right(const CMatrix& x, const HermitianMatrixField& field, const TorusGrid& grid) {
  // X P = (P* X*)* and P is Hermitian block-diagonal.
  return pointwise_left(field, grid, x.adjoint()).adjoint();
}

}  // namespace schatten
