#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schatten/coeff_algebra.hpp"
#include "schatten/linalg.hpp"
#include "schatten/multiindex.hpp"
#include "schatten/norms.hpp"
#include "schatten/torus.hpp"

namespace schatten {

enum class BaseKind { kPolyharmonic, kExplicit };

struct BaseSpec {
  BaseKind kind = BaseKind::kPolyharmonic;
  CMatrix matrix;  // kExplicit only
};

enum class RegionKind {
  kNone,   // a~ = a
  kBox,    // grid cells with |x_i - c_i| <= half_width_i
  kBall,   // grid cells with |x - c| <= radius
  kCells,  // the `cells` samples closest to the center
  kBump,   // a~ = a + phi(x) b with a smooth compactly supported phi, phi(c) = 1
  kPinch,  // inside the ball, the extreme eigenvalues of a are moved to floor/ceiling
};

struct PerturbationSpec {
  RegionKind kind = RegionKind::kNone;
  std::vector<double> center;      // defaults to the origin
  std::vector<double> half_width;  // kBox
  double radius = 0.0;             // kBall, kBump, kPinch
  std::size_t cells = 0;           // kCells
  /// Impurity amplitude b: amplitude_matrix when set, else amplitude_scale * a.
  double amplitude_scale = 0.0;
  std::optional<CMatrix> amplitude_matrix;
  double floor = 1e-6;   // kPinch
  double ceiling = 0.0;  // kPinch; <= 0 leaves the top eigenvalue alone
};

struct Tolerances {
  double ratio_slack = 0.05;
  double factorization = 1e-9;
  double deift = 1e-10;
  double refinement_variation = 0.02;
  double refinement_shrink = 4.0;
  double indicator_law = 1e-12;
  double slope = 1e-6;
};

struct ExperimentConfig {
  std::string id = "experiment";
  int dimension = 1;
  int half_order = 1;
  int n = 64;
  double side = 16.0;
  BaseSpec base;
  PerturbationSpec perturbation;
  std::vector<double> p_values = {4.0};
  std::uint64_t seed = 0;
  std::uint64_t volume_samples = 1'000'000;
  Index max_dim = kDefaultMaxDim;
  Tolerances tolerances;
  bool record_time = false;
};

/// One verified inequality instance. p = inf marks an operator-norm row.
struct ReportRow {
  std::string experiment;
  double p = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double ratio = 0.0;
  double factorization_residual = 0.0;
  double deift_residual = 0.0;
  int n = 0;
  double side = 0.0;
  double seconds = 0.0;
};

/// A pass/fail statement about the rows of a study. `row` is the index of the
/// row the check reads, when it reads a single one. The check is
/// value <= threshold, or value >= threshold when `at_least` is set.
struct Assertion {
  std::string name;
  std::string experiment;
  std::optional<std::size_t> row;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  bool at_least = false;
};

struct StudyResult {
  std::vector<ReportRow> rows;
  std::vector<Assertion> assertions;
  bool passed() const;
  void append(StudyResult other);
};

TorusGrid make_grid(const ExperimentConfig& cfg);
MultiIndexBasis make_basis(const ExperimentConfig& cfg);
CMatrix base_matrix(const ExperimentConfig& cfg);

/// Indicator of the impurity region per grid sample (kBox, kBall, kCells, kPinch),
/// or the bump profile phi (kBump).
std::vector<double> region_profile(const PerturbationSpec& spec, const TorusGrid& grid);

/// |U| = h^N * (number of cells in the region).
double region_volume(const PerturbationSpec& spec, const TorusGrid& grid);

/// The perturbed coefficient field a~. Throws NonPositiveDefinite (with a hint
/// to clip) when a~ fails to be positive definite somewhere, except for kPinch
/// fields, which are returned as built.
HermitianMatrixField perturbed_field(const ExperimentConfig& cfg, const TorusGrid& grid,
                                     const CMatrix& a);

/// Ingredients of (1/2) c_cov^{1/p} ||g||_p^*.
struct BoundConstants {
  double sublevel_volume = 0.0;
  double coarea = 0.0;
  std::vector<double> p_values;
  std::vector<WeightedNorm> g_star;
  std::vector<double> constant;  // inf where ||g||_p^* diverges
};

/// Polyharmonic bases use the exact unit-ball volume; explicit bases estimate
/// vol{A < 1} by Monte Carlo with cfg.volume_samples and cfg.seed.
BoundConstants bound_constants(const ExperimentConfig& cfg);

/// Resolvent difference against the C^p bound constant for every p, the
/// operator-norm bound with constant 1/4, plus factorization and Deift residuals.
StudyResult impurity_experiment(const ExperimentConfig& cfg);

/// Runs impurity_experiment over a battery, concurrently; rows keep battery order.
StudyResult verify_battery(const std::vector<ExperimentConfig>& battery);

struct ScalingSummary {
  StudyResult result;
  std::vector<double> volumes;
  std::vector<double> rhs_slopes;  // per p, log rhs against log |U|
  std::vector<double> lhs_slopes;
};

/// Sweeps |U| using kCells regions of volume/h^N cells around the impurity center.
ScalingSummary volume_scaling_study(const ExperimentConfig& cfg, const std::vector<double>& volumes);

struct ClippingSummary {
  StudyResult result;
  std::vector<int> levels;
  std::vector<double> cauchy;  // ||R_n - R_{2n}|| per level
  double threshold = 0.0;      // level from which cauchy must be non-increasing
};

/// Operator-norm bound per clip level n and Cauchy differences of the clipped
/// resolvents. Uses the first p in cfg.p_values.
ClippingSummary clipping_study(const ExperimentConfig& cfg, const std::vector<int>& levels);

struct RefinementSummary {
  StudyResult result;
  std::vector<int> grid_sizes;
  std::vector<std::vector<double>> lhs;    // [p][grid]
  std::vector<std::vector<double>> ratio;  // [p][grid]
};

RefinementSummary refinement_study(const ExperimentConfig& cfg, const std::vector<int>& grid_sizes);

/// Worker count from SCHATTEN_THREADS, else the hardware concurrency.
unsigned worker_threads();

/// Calls task(i) for i in [0, count) on up to worker_threads() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace schatten
