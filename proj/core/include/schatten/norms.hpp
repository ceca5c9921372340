#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "schatten/coeff_algebra.hpp"
#include "schatten/linalg.hpp"
#include "schatten/torus.hpp"

namespace schatten {

/// Parameters of the weighted space L^p(R_+, t^{(N-2m)/(2m)} dt).
struct WeightedNormSpec {
  double p = 2.0;
  int dimension = 1;
  int half_order = 1;

  double weight_exponent() const;
  /// p > N/m, the finiteness condition for the canonical profile.
  bool canonical_finite() const;
};

/// A bounded continuous profile g on [0, inf) with g(0) = 0. `tail_decay`,
/// when known, is d with |g(t)| ~ t^{-d} as t -> inf and enables an analytic
/// divergence test.
struct Profile {
  std::function<double(double)> eval;
  std::optional<double> tail_decay;

  double operator()(double t) const { return eval(t); }

  /// g(t) = t^{1/2} / (1 + t).
  static Profile canonical();
  static Profile zero();
};

double canonical_g(double t);

/// A finite norm value or the marker for a divergent integral.
class WeightedNorm {
 public:
  static WeightedNorm finite(double value) { return WeightedNorm(value); }
  static WeightedNorm divergent() { return WeightedNorm(); }

  bool is_divergent() const noexcept { return !value_.has_value(); }
  /// Throws InvalidArgument when divergent.
  double value() const;

 private:
  WeightedNorm() = default;
  explicit WeightedNorm(double v) : value_(v) {}
  std::optional<double> value_;
};

/// ||g||_p^* by adaptive quadrature after t = s/(1-s).
WeightedNorm weighted_g_norm(const Profile& g, const WeightedNormSpec& spec, double tol = 1e-13);

/// Beta(p/2 + N/(2m), p/2 - N/(2m))^{1/p} for the canonical profile.
WeightedNorm closed_form_g_star(const WeightedNormSpec& spec);

/// Samples of a nu x nu matrix field (not necessarily Hermitian).
struct PerturbationField {
  TorusGrid grid;
  std::vector<CMatrix> samples;
};

/// (h^N sum_x |V(x)|^p)^{1/p} with |.| the largest singular value; p = inf
/// gives the maximum. Rejects p < 1.
double lp_matrix_field_norm(const PerturbationField& v, double p);

/// Pointwise largest singular values |V(x)|.
std::vector<double> pointwise_operator_norms(const PerturbationField& v);

/// V(x) = a~(x)^{-1/2} (a~(x) - a) a^{-1/2}.
PerturbationField perturbation_V(const CMatrix& a, const HermitianMatrixField& a_tilde,
                                 const TorusGrid& grid);

}  // namespace schatten
