#include "schatten/schatten.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "schatten/errors.hpp"

namespace schatten {

SingularSpectrum singular_spectrum(const CMatrix& m) {
  SingularSpectrum s;
  s.rows = m.rows();
  s.cols = m.cols();
  if (m.size() == 0) return s;
  Eigen::BDCSVD<CMatrix> svd(m);
  const RVector& sv = svd.singularValues();
  s.values.assign(sv.data(), sv.data() + sv.size());
  // Eigen returns them sorted; keep the invariant explicit for callers.
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  for (auto& v : s.values) v = std::max(v, 0.0);
  return s;
}

double schatten_norm(const SingularSpectrum& s, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Schatten exponent must be >= 1");
  if (s.values.empty()) return 0.0;
  const double top = s.values.front();
  if (std::isinf(p) || top == 0.0) return top;
  double sum = 0.0;
  for (double v : s.values) sum += std::pow(v / top, p);
  return top * std::pow(sum, 1.0 / p);
}

double schatten_norm(const CMatrix& m, double p) { return schatten_norm(singular_spectrum(m), p); }

CMatrix resolvent(const CMatrix& op) {
  if (op.rows() != op.cols()) throw InvalidArgument("resolvent of a non-square matrix");
  const CMatrix shifted = op + CMatrix::Identity(op.rows(), op.cols());
  const CMatrix eye = CMatrix::Identity(op.rows(), op.cols());
  Eigen::LLT<CMatrix> llt(shifted);
  CMatrix r;
  if (llt.info() == Eigen::Success) {
    r = llt.solve(eye);
  } else {
    Eigen::PartialPivLU<CMatrix> lu(shifted);
    r = lu.solve(eye);
  }
  if (!r.allFinite()) throw Error("resolvent: solve failed");
  return 0.5 * (r + r.adjoint());
}

CMatrix resolvent(const LinearOperator& op, Index max_dim) { return resolvent(materialize(op, max_dim)); }

double deift_residual(const CMatrix& s) {
  const Index c = s.cols();
  const CMatrix sa = s.adjoint();
  const CMatrix inner = resolvent(CMatrix(sa * s));
  const CMatrix outer = resolvent(CMatrix(s * sa));
  const CMatrix total = inner + sa * outer * s - CMatrix::Identity(c, c);
  return operator_norm(total);
}

ResolventPair assemble_resolvents(const HermitianMatrixField& a, const HermitianMatrixField& a_tilde,
                                  const TorusGrid& grid, Index max_dim) {
  ResolventPair pair{grid, a.basis(), {}, {}, {}, {}};
  pair.H = materialize(assemble_H_const(a, grid), max_dim);
  pair.H_tilde = materialize(assemble_H_var(a_tilde, grid), max_dim);
  pair.R = resolvent(pair.H);
  pair.R_tilde = resolvent(pair.H_tilde);
  return pair;
}

CMatrix factorization_chain(const HermitianMatrixField& a, const HermitianMatrixField& a_tilde,
                            const TorusGrid& grid, Index max_dim) {
  if (!a.is_constant()) throw InvalidArgument("factorization_chain: a must be constant");
  const MultiIndexBasis& basis = a.basis();
  const CMatrix D = materialize(derivative_operator(grid, basis), max_dim);
  const CMatrix K = D * D.adjoint();

  const HermitianMatrixField b = sqrt_field(a);
  const HermitianMatrixField bt = sqrt_field(a_tilde);
  const CMatrix F = pointwise_right(pointwise_left(b, grid, K), b, grid);
  const CMatrix Ft = pointwise_right(pointwise_left(bt, grid, K), bt, grid);

  // W(x) = a~^{-1/2} (a - a~) a^{-1/2}
  const CMatrix a_inv_sqrt = matrix_inv_sqrt(a.value());
  std::vector<CMatrix> W;
  W.reserve(a_tilde.sample_count());
  for (const auto& at : a_tilde.samples()) W.push_back(matrix_inv_sqrt(at) * (a.value() - at) * a_inv_sqrt);

  CMatrix x = pointwise_left(b, grid, D);
  x = resolvent(F) * x;
  x = pointwise_left(std::span<const CMatrix>(W), grid, x);
  x = resolvent(Ft) * x;
  x = pointwise_left(bt, grid, x);
  return D.adjoint() * x;
}

namespace {
// Resolvents have norm <= 1, so this is an absolute scale.
constexpr double kNumericallyZero = 1e-12;
}  // namespace

double factorization_residual(const CMatrix& direct, const CMatrix& chain) {
  const double diff = operator_norm(direct - chain);
  const double scale = operator_norm(direct);
  return scale <= kNumericallyZero ? diff : diff / scale;
}

double factorization_residual(const HermitianMatrixField& a, const HermitianMatrixField& a_tilde,
                              const TorusGrid& grid, Index max_dim) {
  const ResolventPair pair = assemble_resolvents(a, a_tilde, grid, max_dim);
  return factorization_residual(pair.difference(), factorization_chain(a, a_tilde, grid, max_dim));
}

PolarCheck polar_isometry_check(const HermitianMatrixField& a, const TorusGrid& grid, Index max_dim) {
  if (!a.is_constant()) throw InvalidArgument("polar_isometry_check: a must be constant");
  const CMatrix D = materialize(derivative_operator(grid, a.basis()), max_dim);
  PolarCheck check;
  check.S = pointwise_left(sqrt_field(a), grid, D);

  Eigen::BDCSVD<CMatrix> svd(check.S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * 1e-10;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  check.U = svd.matrixU().leftCols(rank) * svd.matrixV().leftCols(rank).adjoint();

  const CMatrix F = check.S * check.S.adjoint();
  check.F_sqrt = hermitian_function(F, [](double x) { return std::sqrt(std::max(x, 0.0)); });

  check.factor_residual = operator_norm(check.S - check.F_sqrt * check.U);
  check.isometry_residual = operator_norm(check.U * check.U.adjoint() * check.U - check.U);
  return check;
}

MatrixKernel kernel_of_gF(const CMatrix& b, const MultiIndexBasis& basis, const TorusGrid& grid,
                          const std::function<double(double)>& g) {
  const std::size_t M = grid.size();
  const auto nu = static_cast<Index>(basis.size());
  std::vector<CMatrix> symbols;
  symbols.reserve(M);
  for (std::size_t k = 0; k < M; ++k) symbols.push_back(symbol_Lg(b, basis, grid.frequency(k), g));

  // k_g(z_j) = L^{-N} sum_k Lg(xi_k) e^{i xi_k z_j} = h^{-N} ifft(Lg)(j)
  MatrixKernel kernel{grid, std::vector<CMatrix>(M, CMatrix::Zero(nu, nu))};
  const double scale = 1.0 / grid.cell_volume();
  std::vector<Complex> entry(M), values(M);
  for (Index r = 0; r < nu; ++r) {
    for (Index c = 0; c < nu; ++c) {
      for (std::size_t k = 0; k < M; ++k) entry[k] = symbols[k](r, c);
      detail::fft_inverse(grid, entry, values);
      for (std::size_t z = 0; z < M; ++z) kernel.values[z](r, c) = scale * values[z];
    }
  }
  return kernel;
}

namespace {

const CMatrix& sample(std::span<const CMatrix> v, std::size_t x) { return v.size() == 1 ? v[0] : v[x]; }

void require_kernel_field(std::span<const CMatrix> v, const MatrixKernel& kernel) {
  if (v.empty() || (v.size() != 1 && v.size() != kernel.grid.size()))
    throw InvalidArgument("field does not match the kernel grid");
  if (kernel.values.empty() || v[0].cols() != kernel.values[0].rows())
    throw InvalidArgument("field and kernel matrix sizes differ");
}

}  // namespace

CMatrix kernel_operator_matrix(std::span<const CMatrix> v, const MatrixKernel& kernel) {
  require_kernel_field(v, kernel);
  const TorusGrid& grid = kernel.grid;
  const auto M = static_cast<Index>(grid.size());
  const Index rows = v[0].rows();
  const Index cols = kernel.values[0].cols();
  const double w = grid.cell_volume();
  CMatrix out(rows * M, cols * M);
  for (Index x = 0; x < M; ++x) {
    for (Index y = 0; y < M; ++y) {
      const std::size_t z = grid.difference_index(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      const CMatrix block = w * sample(v, static_cast<std::size_t>(x)) * kernel.values[z];
      for (Index a = 0; a < rows; ++a)
        for (Index c = 0; c < cols; ++c) out(a * M + x, c * M + y) = block(a, c);
    }
  }
  return out;
}

double kernel_hilbert_schmidt_norm(std::span<const CMatrix> v, const MatrixKernel& kernel) {
  require_kernel_field(v, kernel);
  const TorusGrid& grid = kernel.grid;
  const std::size_t M = grid.size();
  double sum = 0.0;
  for (std::size_t x = 0; x < M; ++x)
    for (std::size_t y = 0; y < M; ++y)
      sum += (sample(v, x) * kernel.values[grid.difference_index(x, y)]).squaredNorm();
  const double w = grid.cell_volume();
  return std::sqrt(w * w * sum);
}

double bound_ratio(double lhs, double constant, double rhs) {
  const double denom = constant * rhs;
  if (std::isinf(denom)) return 0.0;
  // Resolvent differences are bounded by 1, so an absolute floor separates
  // round-off from a genuine violation of a vanishing bound.
  if (denom == 0.0) return lhs <= kRoundoffFloor ? 0.0 : kInfinity;
  return lhs / denom;
}

BoundCheck operator_norm_bound_check(const CMatrix& H_tilde, const CMatrix& H, double v_inf) {
  BoundCheck check;
  check.lhs = operator_norm(resolvent(H_tilde) - resolvent(H));
  check.rhs = v_inf;
  check.constant = 0.25;
  check.ratio = bound_ratio(check.lhs, check.constant, check.rhs);
  check.context = "operator norm vs (1/4) sup |V|";
  return check;
}

}  // namespace schatten
