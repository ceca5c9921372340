#pragma once

#include <cstddef>
#include <functional>

namespace schatten {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7-15) on [a, b]. Bisects the interval with
/// the largest error estimate until the total estimate drops below
/// max(abs_tol, rel_tol |value|) or `max_intervals` is reached. Nodes are
/// interior, so integrable endpoint singularities are allowed.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol,
                                    std::size_t max_intervals = 4000);

}  // namespace schatten
