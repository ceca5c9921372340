#include "schatten/multiindex.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "schatten/errors.hpp"

namespace schatten {

int MultiIndex::order() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

MultiIndexBasis::MultiIndexBasis(int dimension, int half_order, std::vector<MultiIndex> entries)
    : dimension_(dimension), half_order_(half_order), entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (static_cast<int>(e.dimension()) != dimension_ || e.order() != half_order_)
      throw InvalidArgument("multi-index does not match basis (N, m)");
    if (std::any_of(e.exponents.begin(), e.exponents.end(), [](int k) { return k < 0; }))
      throw InvalidArgument("multi-index with negative exponent");
  }
}

std::size_t MultiIndexBasis::index_of(const MultiIndex& alpha) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), alpha);
  if (it == entries_.end() || !(*it == alpha)) throw InvalidArgument("multi-index not in basis");
  return static_cast<std::size_t>(it - entries_.begin());
}

double MultiIndexBasis::factorial(const MultiIndex& alpha) {
  double f = 1.0;
  for (int k : alpha.exponents)
    for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::size_t basis_size(int dimension, int half_order) {
  return binomial(static_cast<std::size_t>(dimension + half_order - 1),
                  static_cast<std::size_t>(dimension - 1));
}

namespace {

// Emits exponent vectors in ascending lexicographic order: the leading
// coordinate runs from 0 upward, the remainder is enumerated recursively.
void enumerate(int remaining, std::size_t pos, std::vector<int>& current,
               std::vector<MultiIndex>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.push_back(MultiIndex{current});
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    current[pos] = k;
    enumerate(remaining - k, pos + 1, current, out);
  }
}

}  // namespace

MultiIndexBasis enumerate_basis(int dimension, int half_order) {
  if (dimension < 1) throw InvalidArgument("dimension N must be >= 1, got " + std::to_string(dimension));
  if (half_order < 1) throw InvalidArgument("half-order m must be >= 1, got " + std::to_string(half_order));
  std::vector<MultiIndex> entries;
  entries.reserve(basis_size(dimension, half_order));
  std::vector<int> current(static_cast<std::size_t>(dimension), 0);
  enumerate(half_order, 0, current, entries);
  return MultiIndexBasis(dimension, half_order, std::move(entries));
}

namespace {

template <typename T>
T monomial_impl(std::span<const T> xi, const MultiIndex& gamma) {
  if (xi.size() != gamma.dimension()) throw InvalidArgument("monomial: dimension mismatch");
  T r(1);
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (int k = 0; k < gamma.exponents[i]; ++k) r *= xi[i];
  return r;
}

}  // namespace

double monomial(std::span<const double> xi, const MultiIndex& gamma) {
  return monomial_impl(xi, gamma);
}

std::complex<double> monomial(std::span<const std::complex<double>> xi, const MultiIndex& gamma) {
  return monomial_impl(xi, gamma);
}

}  // namespace schatten
