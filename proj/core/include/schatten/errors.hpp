#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace schatten {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix (or a matrix field) that had to be positive definite was not.
/// `points` lists the offending grid samples for sampled fields and is empty
/// for a single matrix.
class NonPositiveDefinite : public Error {
 public:
  NonPositiveDefinite(double min_eigenvalue, std::vector<std::size_t> points = {});

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }
  const std::vector<std::size_t>& points() const noexcept { return points_; }

 private:
  double min_eigenvalue_;
  std::vector<std::size_t> points_;
};

/// Dense materialization was requested above the configured budget.
class DimensionCap : public Error {
 public:
  DimensionCap(std::size_t requested, std::size_t cap);

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

}  // namespace schatten
