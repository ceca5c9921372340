#include "schatten/coeff_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "schatten/errors.hpp"

namespace schatten {

NonPositiveDefinite::NonPositiveDefinite(double min_eigenvalue, std::vector<std::size_t> points)
    : Error("matrix is not positive definite (smallest eigenvalue " + std::to_string(min_eigenvalue) +
            (points.empty() ? std::string(")")
                            : ") at " + std::to_string(points.size()) + " grid point(s), first " +
                                  std::to_string(points.front()))),
      min_eigenvalue_(min_eigenvalue),
      points_(std::move(points)) {}

DimensionCap::DimensionCap(std::size_t requested, std::size_t cap)
    : Error("dense dimension " + std::to_string(requested) + " exceeds cap " + std::to_string(cap)),
      requested_(requested),
      cap_(cap) {}

double hermitian_residual(const CMatrix& a) {
  const double n = a.norm();
  if (n == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / n;
}

CMatrix hermitian_function(const CMatrix& a, const std::function<double(double)>& f) {
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  RVector fx = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fx.asDiagonal() * es.eigenvectors().adjoint();
}

double min_eigenvalue(const CMatrix& a) {
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

namespace {

constexpr double kHermitianTol = 1e-12;

void require_hermitian(const CMatrix& a, Index nu) {
  if (a.rows() != nu || a.cols() != nu) throw InvalidArgument("coefficient matrix has wrong size");
  if (hermitian_residual(a) > kHermitianTol) throw InvalidArgument("coefficient matrix is not Hermitian");
}

}  // namespace

HermitianMatrixField::HermitianMatrixField(MultiIndexBasis basis, bool constant, std::vector<CMatrix> samples)
    : basis_(std::move(basis)), constant_(constant), samples_(std::move(samples)) {
  if (samples_.empty()) throw InvalidArgument("empty coefficient field");
  for (const auto& s : samples_) require_hermitian(s, nu());
}

HermitianMatrixField HermitianMatrixField::constant(MultiIndexBasis basis, CMatrix value) {
  std::vector<CMatrix> v;
  v.push_back(std::move(value));
  return HermitianMatrixField(std::move(basis), true, std::move(v));
}

HermitianMatrixField HermitianMatrixField::sampled(MultiIndexBasis basis, std::vector<CMatrix> samples) {
  return HermitianMatrixField(std::move(basis), false, std::move(samples));
}

const CMatrix& HermitianMatrixField::value() const {
  if (!constant_) throw InvalidArgument("value() on a sampled field");
  return samples_.front();
}

HermitianMatrixField HermitianMatrixField::transform(
    const std::function<CMatrix(const CMatrix&)>& f) const {
  std::vector<CMatrix> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(f(s));
  return HermitianMatrixField(basis_, constant_, std::move(out));
}

void HermitianMatrixField::require_positive_definite() const {
  std::vector<std::size_t> bad;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double lo = min_eigenvalue(samples_[i]);
    if (lo <= 0.0) {
      bad.push_back(i);
      worst = std::min(worst, lo);
    }
  }
  if (!bad.empty()) throw NonPositiveDefinite(worst, std::move(bad));
}

CMatrix matrix_sqrt(const CMatrix& a) {
  const double lo = min_eigenvalue(a);
  if (lo <= 0.0) throw NonPositiveDefinite(lo);
  return hermitian_function(a, [](double x) { return std::sqrt(x); });
}

CMatrix matrix_inv_sqrt(const CMatrix& a) {
  const double lo = min_eigenvalue(a);
  if (lo <= 0.0) throw NonPositiveDefinite(lo);
  return hermitian_function(a, [](double x) { return 1.0 / std::sqrt(x); });
}

CMatrix clip_spectrum(const CMatrix& a, double lo, double hi) {
  return hermitian_function(a, [lo, hi](double x) { return std::max(lo, std::min(x, hi)); });
}

HermitianMatrixField clip_coefficients(const HermitianMatrixField& a_tilde, int n) {
  if (n <= 0) throw InvalidArgument("clip level n must be a positive integer");
  const double hi = n;
  const double lo = 1.0 / n;
  return a_tilde.transform([lo, hi](const CMatrix& m) { return clip_spectrum(m, lo, hi); });
}

HermitianMatrixField sqrt_field(const HermitianMatrixField& a) {
  a.require_positive_definite();
  return a.transform([](const CMatrix& m) { return matrix_sqrt(m); });
}

CMatrix polyharmonic_coefficients(const MultiIndexBasis& basis) {
  const auto nu = static_cast<Index>(basis.size());
  double m_fact = 1.0;
  for (int j = 2; j <= basis.half_order(); ++j) m_fact *= j;
  CMatrix a = CMatrix::Zero(nu, nu);
  for (Index i = 0; i < nu; ++i) a(i, i) = m_fact / MultiIndexBasis::factorial(basis[static_cast<std::size_t>(i)]);
  return a;
}

CVector monomial_vector(const MultiIndexBasis& basis, std::span<const double> xi) {
  if (xi.size() != static_cast<std::size_t>(basis.dimension()))
    throw InvalidArgument("frequency has wrong dimension");
  CVector v(static_cast<Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) v(static_cast<Index>(i)) = monomial(xi, basis[i]);
  return v;
}

CVector symbol_B(const CMatrix& b, const MultiIndexBasis& basis, std::span<const double> xi) {
  const auto nu = static_cast<Index>(basis.size());
  if (b.rows() != nu || b.cols() != nu) throw InvalidArgument("symbol_B: b does not match the basis");
  return b * monomial_vector(basis, xi);
}

double principal_symbol_A(const CMatrix& b, const MultiIndexBasis& basis, std::span<const double> xi) {
  return symbol_B(b, basis, xi).squaredNorm();
}

CMatrix symbol_Lg(const CMatrix& b, const MultiIndexBasis& basis, std::span<const double> xi,
                  const std::function<double(double)>& g) {
  const CVector B = symbol_B(b, basis, xi);
  const double A = B.squaredNorm();
  if (A == 0.0) return CMatrix::Zero(B.size(), B.size());
  return (g(A) / A) * (B * B.adjoint());
}

SymbolEvaluation evaluate_symbol(const CMatrix& b, const MultiIndexBasis& basis,
                                 std::span<const double> xi, const std::function<double(double)>* g) {
  SymbolEvaluation ev;
  ev.xi.assign(xi.begin(), xi.end());
  ev.B = symbol_B(b, basis, xi);
  ev.A = ev.B.squaredNorm();
  if (g != nullptr) ev.Lg = symbol_Lg(b, basis, xi, *g);
  return ev;
}

double sublevel_box_radius(const CMatrix& b, const MultiIndexBasis& basis) {
  // lambda_min(a) = lambda_min(b)^2 for Hermitian positive definite b.
  const double lb = min_eigenvalue(b);
  if (lb <= 0.0) throw NonPositiveDefinite(lb);
  const double lambda_min = lb * lb;
  return std::sqrt(static_cast<double>(basis.dimension())) *
         std::pow(lambda_min, -1.0 / (2.0 * basis.half_order()));
}

namespace {

constexpr std::uint64_t kVolumeStreams = 16;

std::uint64_t count_inside(const CMatrix& b, const MultiIndexBasis& basis, double radius,
                           std::uint64_t samples, std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(-radius, radius);
  const auto N = static_cast<std::size_t>(basis.dimension());
  std::vector<double> xi(N);
  std::uint64_t inside = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& x : xi) x = unif(rng);
    if (principal_symbol_A(b, basis, xi) < 1.0) ++inside;
  }
  return inside;
}

}  // namespace

VolumeEstimate sublevel_volume(const CMatrix& b, const MultiIndexBasis& basis, std::uint64_t samples,
                               std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw InvalidArgument("sublevel_volume needs at least one sample");
  const double radius = sublevel_box_radius(b, basis);
  std::vector<std::uint64_t> per_stream(kVolumeStreams, samples / kVolumeStreams);
  for (std::uint64_t s = 0; s < samples % kVolumeStreams; ++s) ++per_stream[s];
  std::vector<std::uint64_t> hits(kVolumeStreams, 0);

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, kVolumeStreams));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t s = w; s < kVolumeStreams; s += workers)
        hits[s] = count_inside(b, basis, radius, per_stream[s], seed, s);
    });
  }
  for (std::uint64_t s = 0; s < kVolumeStreams; s += workers)
    hits[s] = count_inside(b, basis, radius, per_stream[s], seed, s);
  for (auto& t : pool) t.join();

  std::uint64_t inside = 0;
  for (auto h : hits) inside += h;
  const double box = std::pow(2.0 * radius, basis.dimension());
  const double frac = static_cast<double>(inside) / static_cast<double>(samples);
  VolumeEstimate est;
  est.value = box * frac;
  est.std_error = box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  est.samples = samples;
  return est;
}

double unit_ball_volume(int dimension) {
  const double d = dimension;
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double coarea_constant_from_volume(double volume, int dimension, int half_order) {
  return std::pow(2.0 * std::numbers::pi, -dimension) *
         (static_cast<double>(dimension) / (2.0 * half_order)) * volume;
}

VolumeEstimate coarea_constant(const CMatrix& b, const MultiIndexBasis& basis, std::uint64_t samples,
                               std::uint64_t seed, unsigned threads) {
  VolumeEstimate vol = sublevel_volume(b, basis, samples, seed, threads);
  const double scale = coarea_constant_from_volume(1.0, basis.dimension(), basis.half_order());
  vol.value *= scale;
  vol.std_error *= scale;
  return vol;
}

}  // namespace schatten
