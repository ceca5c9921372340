#include "schatten/norms.hpp"

#include <algorithm>
#include <cmath>

#include "schatten/errors.hpp"
#include "schatten/quadrature.hpp"

namespace schatten {

double WeightedNormSpec::weight_exponent() const {
  return static_cast<double>(dimension - 2 * half_order) / (2.0 * half_order);
}

bool WeightedNormSpec::canonical_finite() const {
  return p > static_cast<double>(dimension) / half_order;
}

double canonical_g(double t) { return std::sqrt(t) / (1.0 + t); }

Profile Profile::canonical() { return Profile{canonical_g, 0.5}; }

Profile Profile::zero() {
  return Profile{[](double) { return 0.0; }, std::nullopt};
}

double WeightedNorm::value() const {
  if (!value_) throw InvalidArgument("weighted norm is divergent");
  return *value_;
}

namespace {

constexpr double kGrowthCap = 1e150;

void validate(const WeightedNormSpec& spec) {
  if (!(spec.p >= 1.0) || std::isinf(spec.p)) throw InvalidArgument("weighted norm needs 1 <= p < inf");
  if (spec.dimension < 1 || spec.half_order < 1) throw InvalidArgument("weighted norm needs N, m >= 1");
}

}  // namespace

WeightedNorm weighted_g_norm(const Profile& g, const WeightedNormSpec& spec, double tol) {
  validate(spec);
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  const double p = spec.p;
  const double w = spec.weight_exponent();
  // |g|^p t^w ~ t^{w - p d} at infinity.
  if (g.tail_decay && w - p * *g.tail_decay >= -1.0) return WeightedNorm::divergent();

  auto integrand = [&](double t) {
    const double gt = std::abs(g(t));
    if (gt == 0.0) return 0.0;
    return std::pow(gt, p) * std::pow(t, w);
  };
  // t = s/(1-s) on s in (0, 1/2]; on (1/2, 1) the complement r = 1 - s is used
  // directly so that the approach to t = inf keeps full relative precision.
  auto near = [&](double s) {
    const double r = 1.0 - s;
    return integrand(s / r) / (r * r);
  };
  auto far = [&](double r) { return integrand((1.0 - r) / r) / (r * r); };

  const QuadratureResult lo = integrate_adaptive(near, 0.0, 0.5, 0.0, tol);
  const QuadratureResult hi = integrate_adaptive(far, 0.0, 0.5, 0.0, tol);
  const double total = lo.value + hi.value;
  if (!lo.converged || !hi.converged || !std::isfinite(total) || total > kGrowthCap)
    return WeightedNorm::divergent();
  return WeightedNorm::finite(std::pow(std::max(total, 0.0), 1.0 / p));
}

WeightedNorm closed_form_g_star(const WeightedNormSpec& spec) {
  validate(spec);
  if (!spec.canonical_finite()) return WeightedNorm::divergent();
  const double ratio = static_cast<double>(spec.dimension) / (2.0 * spec.half_order);
  const double x = spec.p / 2.0 + ratio;
  const double y = spec.p / 2.0 - ratio;
  return WeightedNorm::finite(std::pow(std::beta(x, y), 1.0 / spec.p));
}

std::vector<double> pointwise_operator_norms(const PerturbationField& v) {
  std::vector<double> out;
  out.reserve(v.samples.size());
  for (const auto& m : v.samples) out.push_back(operator_norm(m));
  return out;
}

double lp_matrix_field_norm(const PerturbationField& v, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p norm needs p >= 1");
  if (v.samples.size() != v.grid.size()) throw InvalidArgument("matrix field does not cover the grid");
  const auto norms = pointwise_operator_norms(v);
  if (norms.empty()) return 0.0;
  const double top = *std::max_element(norms.begin(), norms.end());
  if (std::isinf(p) || top == 0.0) return top;
  double sum = 0.0;
  for (double x : norms) sum += std::pow(x / top, p);
  return top * std::pow(v.grid.cell_volume() * sum, 1.0 / p);
}

PerturbationField perturbation_V(const CMatrix& a, const HermitianMatrixField& a_tilde, const TorusGrid& grid) {
  if (!a_tilde.is_constant() && a_tilde.sample_count() != grid.size())
    throw InvalidArgument("perturbation_V: field does not match the grid");
  a_tilde.require_positive_definite();
  const CMatrix a_inv_sqrt = matrix_inv_sqrt(a);
  PerturbationField v{grid, {}};
  v.samples.reserve(grid.size());
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const CMatrix& at = a_tilde.at(x);
    v.samples.push_back(matrix_inv_sqrt(at) * (at - a) * a_inv_sqrt);
  }
  return v;
}

}  // namespace schatten
