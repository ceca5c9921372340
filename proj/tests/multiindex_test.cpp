#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "schatten/errors.hpp"
#include "schatten/multiindex.hpp"

namespace schatten {
namespace {

std::vector<std::vector<int>> exponents(const MultiIndexBasis& b) {
  std::vector<std::vector<int>> out;
  for (const auto& e : b.entries()) out.push_back(e.exponents);
  return out;
}

TEST(MultiIndex, SingleVariableHasOneIndex) {
  const auto b = enumerate_basis(1, 3);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].exponents, std::vector<int>{3});
}

TEST(MultiIndex, TwoVariablesOrderTwoIsLexicographic) {
  const auto b = enumerate_basis(2, 2);
  const std::vector<std::vector<int>> expected = {{0, 2}, {1, 1}, {2, 0}};
  EXPECT_EQ(exponents(b), expected);
}

TEST(MultiIndex, ThreeVariablesOrderTwoHasSix) { EXPECT_EQ(enumerate_basis(3, 2).size(), 6u); }

TEST(MultiIndex, RejectsZeroDimensionOrOrder) {
  EXPECT_THROW(enumerate_basis(0, 2), InvalidArgument);
  EXPECT_THROW(enumerate_basis(2, 0), InvalidArgument);
}

TEST(MultiIndex, SizeMatchesStarsAndBars) {
  for (int N = 1; N <= 4; ++N)
    for (int m = 1; m <= 4; ++m) {
      const auto b = enumerate_basis(N, m);
      EXPECT_EQ(b.size(), binomial(static_cast<std::size_t>(N + m - 1), static_cast<std::size_t>(N - 1)))
          << "N=" << N << " m=" << m;
      EXPECT_EQ(b.size(), basis_size(N, m));
    }
}

TEST(MultiIndex, MatchesBruteForceEnumeration) {
  for (int N = 1; N <= 4; ++N)
    for (int m = 1; m <= 4; ++m) EXPECT_EQ(exponents(enumerate_basis(N, m)), oracle::brute_force_basis(N, m));
}

TEST(MultiIndex, EntriesDistinctWithOrderM) {
  const auto b = enumerate_basis(3, 4);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_EQ(b[i].order(), 4);
    EXPECT_EQ(b.index_of(b[i]), i);
    for (std::size_t j = i + 1; j < b.size(); ++j) EXPECT_LT(b[i], b[j]);
  }
  EXPECT_THROW(b.index_of(MultiIndex{{1, 1, 1}}), InvalidArgument);
}

TEST(MultiIndex, Factorial) {
  EXPECT_DOUBLE_EQ(MultiIndexBasis::factorial(MultiIndex{{2, 3}}), 12.0);
  EXPECT_DOUBLE_EQ(MultiIndexBasis::factorial(MultiIndex{{0, 0}}), 1.0);
}

TEST(Monomial, Examples) {
  const std::vector<double> xi = {2.0, 3.0};
  EXPECT_DOUBLE_EQ(monomial(xi, MultiIndex{{1, 1}}), 6.0);
  EXPECT_DOUBLE_EQ(monomial(std::vector<double>{-7.5, 0.0}, MultiIndex{{0, 0}}), 1.0);
  EXPECT_DOUBLE_EQ(monomial(std::vector<double>{0.0, 5.0}, MultiIndex{{2, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(monomial(std::vector<double>{0.0, 0.0}, MultiIndex{{0, 0}}), 1.0);
}

TEST(Monomial, ComplexArguments) {
  const std::vector<std::complex<double>> xi = {{0.0, 1.0}, {2.0, 0.0}};
  const auto v = monomial(xi, MultiIndex{{2, 1}});
  EXPECT_NEAR(v.real(), -2.0, 1e-15);
  EXPECT_NEAR(v.imag(), 0.0, 1e-15);
}

TEST(Monomial, HomogeneousOfDegreeM) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int N = 1; N <= 3; ++N)
    for (int m = 1; m <= 4; ++m) {
      const auto basis = enumerate_basis(N, m);
      for (const auto& gamma : basis.entries())
        for (int trial = 0; trial < 5; ++trial) {
          std::vector<double> xi(static_cast<std::size_t>(N)), scaled(xi.size());
          const double lambda = u(rng);
          for (std::size_t i = 0; i < xi.size(); ++i) {
            xi[i] = u(rng);
            scaled[i] = lambda * xi[i];
          }
          const double expected = std::pow(lambda, m) * monomial(xi, gamma);
          EXPECT_NEAR(monomial(scaled, gamma), expected, 1e-12 * (1.0 + std::abs(expected)));
        }
    }
}

}  // namespace
}  // namespace schatten
