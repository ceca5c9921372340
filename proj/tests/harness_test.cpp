#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include "schatten/errors.hpp"
#include "schatten/experiment.hpp"
#include "schatten/report.hpp"
#include "schatten/schatten.hpp"

namespace schatten {
namespace {

ExperimentConfig small(int N, int m, int n, double L, RegionKind kind, double amplitude) {
  ExperimentConfig c;
  c.id = "t";
  c.dimension = N;
  c.half_order = m;
  c.n = n;
  c.side = L;
  c.perturbation.kind = kind;
  c.perturbation.amplitude_scale = amplitude;
  c.perturbation.half_width.assign(static_cast<std::size_t>(N), L / 16);
  c.perturbation.radius = L / 16;
  c.p_values = {4.0};
  return c;
}

const Assertion* find(const StudyResult& r, const std::string& name) {
  for (const auto& a : r.assertions)
    if (a.name == name) return &a;
  return nullptr;
}

TEST(Region, BoxAndBallRasterization) {
  const TorusGrid grid(2, 16, 8.0);
  PerturbationSpec box;
  box.kind = RegionKind::kBox;
  box.half_width = {1.0, 0.5};
  EXPECT_NEAR(region_volume(box, grid), 5 * 3 * grid.cell_volume(), 1e-14);
  PerturbationSpec ball;
  ball.kind = RegionKind::kBall;
  ball.radius = 1.0;
  // Lattice points of spacing 1/2 within distance 1: 13 of them.
  EXPECT_NEAR(region_volume(ball, grid), 13 * grid.cell_volume(), 1e-14);
  PerturbationSpec cells;
  cells.kind = RegionKind::kCells;
  cells.cells = 7;
  EXPECT_NEAR(region_volume(cells, grid), 7 * grid.cell_volume(), 1e-14);
  PerturbationSpec bump;
  bump.kind = RegionKind::kBump;
  bump.radius = 2.0;
  const auto phi = region_profile(bump, grid);
  EXPECT_NEAR(*std::max_element(phi.begin(), phi.end()), 1.0, 1e-15);
  EXPECT_GE(*std::min_element(phi.begin(), phi.end()), 0.0);
}

TEST(Region, WrongDimensionRejected) {
  const TorusGrid grid(2, 8, 4.0);
  PerturbationSpec box;
  box.kind = RegionKind::kBox;
  box.half_width = {1.0};
  EXPECT_THROW(region_profile(box, grid), InvalidArgument);
}

TEST(Experiment, ZeroAmplitudeGivesZeroRatio) {
  auto c = small(1, 1, 32, 8.0, RegionKind::kBox, 0.0);
  c.p_values = {2.0, 4.0};
  const auto r = impurity_experiment(c);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_LT(row.lhs, 1e-12);
    EXPECT_EQ(row.rhs, 0.0);
    EXPECT_EQ(row.ratio, 0.0);
  }
  EXPECT_TRUE(r.passed());
}

TEST(Experiment, OneDimensionalBoxWithinBound) {
  auto c = small(1, 1, 64, 16.0, RegionKind::kBox, 0.5);
  const auto r = impurity_experiment(c);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.rows[0].ratio, 0.0);
  EXPECT_LE(r.rows[0].ratio, 1.05);
  EXPECT_LT(r.rows[0].factorization_residual, 1e-10);
  EXPECT_TRUE(std::isinf(r.rows.back().p));
  EXPECT_EQ(r.rows.back().constant, 0.25);
}

TEST(Experiment, TwoDimensionalDiskWithinBound) {
  auto c = small(2, 1, 16, 12.0, RegionKind::kBall, 0.5);
  const auto r = impurity_experiment(c);
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.rows[0].ratio, 1.05);
  EXPECT_GT(r.rows[0].ratio, 0.0);
}

TEST(Experiment, DivergentConstantReportedNotAsserted) {
  auto c = small(2, 1, 8, 8.0, RegionKind::kBall, 0.5);
  c.perturbation.radius = 1.0;
  c.p_values = {2.0, 4.0};
  const auto r = impurity_experiment(c);
  EXPECT_TRUE(std::isinf(r.rows[0].constant));
  EXPECT_EQ(r.rows[0].ratio, 0.0);
  std::size_t schatten_checks = 0;
  for (const auto& a : r.assertions) schatten_checks += a.name == "schatten_bound_ratio";
  EXPECT_EQ(schatten_checks, 1u);
}

TEST(Experiment, SchattenMonotonicityAcrossRows) {
  auto c = small(1, 2, 32, 8.0, RegionKind::kBall, 2.0);
  c.p_values = {2.0, 3.0, 4.0, 8.0};
  const auto r = impurity_experiment(c);
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LE(r.rows[i].lhs, r.rows[i - 1].lhs * (1 + 1e-12));
  for (const auto& row : r.rows) EXPECT_GE(row.ratio, 0.0);
}

TEST(Experiment, NonPositiveDefiniteIsReported) {
  auto c = small(1, 1, 16, 8.0, RegionKind::kBox, -1.5);
  EXPECT_THROW(impurity_experiment(c), NonPositiveDefinite);
}

TEST(Experiment, DimensionCapIsReported) {
  auto c = small(2, 1, 16, 8.0, RegionKind::kBall, 0.5);
  c.max_dim = 100;
  EXPECT_THROW(impurity_experiment(c), DimensionCap);
}

TEST(Constants, PolyharmonicUsesExactVolume) {
  auto c = small(2, 1, 8, 8.0, RegionKind::kNone, 0.0);
  c.p_values = {2.0, 4.0};
  const auto k = bound_constants(c);
  EXPECT_NEAR(k.sublevel_volume, std::numbers::pi, 1e-14);
  EXPECT_NEAR(k.coarea, 1 / (4 * std::numbers::pi), 1e-15);
  EXPECT_TRUE(k.g_star[0].is_divergent());
  EXPECT_TRUE(std::isinf(k.constant[0]));
  EXPECT_NEAR(k.constant[1], 0.5 * std::pow(k.coarea, 0.25) * std::pow(1.0 / 3.0, 0.25), 1e-14);
}

TEST(Constants, ExplicitBaseUsesSeededMonteCarlo) {
  auto c = small(2, 1, 8, 8.0, RegionKind::kNone, 0.0);
  c.base.kind = BaseKind::kExplicit;
  c.base.matrix = CMatrix::Identity(2, 2);
  c.volume_samples = 200000;
  c.seed = 4;
  const auto k1 = bound_constants(c);
  const auto k2 = bound_constants(c);
  EXPECT_EQ(k1.sublevel_volume, k2.sublevel_volume);
  EXPECT_NEAR(k1.sublevel_volume, std::numbers::pi, 0.02);
}

TEST(Scaling, IndicatorLawAndSlope) {
  auto c = small(1, 1, 64, 16.0, RegionKind::kCells, 0.5);
  c.p_values = {4.0, 8.0};
  const std::vector<double> volumes = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  const auto s = volume_scaling_study(c, volumes);
  EXPECT_TRUE(s.result.passed());
  ASSERT_EQ(s.rhs_slopes.size(), 2u);
  EXPECT_NEAR(s.rhs_slopes[0], 0.25, 1e-6);
  EXPECT_NEAR(s.rhs_slopes[1], 0.125, 1e-6);
  // Doubling |U| multiplies rhs by 2^{1/p}; three rows per volume (p = 4, 8, inf).
  for (std::size_t j = 1; j < volumes.size(); ++j)
    EXPECT_NEAR(s.result.rows[3 * j].rhs / s.result.rows[3 * (j - 1)].rhs, std::pow(2.0, 0.25), 1e-12);
  for (const auto& row : s.result.rows)
    if (!std::isinf(row.p)) {
      EXPECT_LE(row.lhs, row.constant * row.rhs);
    }
}

TEST(Scaling, RejectsFractionalCellCounts) {
  auto c = small(1, 1, 64, 16.0, RegionKind::kCells, 0.5);
  EXPECT_THROW(volume_scaling_study(c, {0.3, 0.6}), InvalidArgument);
}

TEST(Clipping, IdentityWhenSpectrumInsideWindow) {
  auto c = small(1, 1, 32, 8.0, RegionKind::kBall, 0.5);
  c.perturbation.radius = 1.0;
  const auto base = impurity_experiment(c);
  const auto s = clipping_study(c, {4, 8});
  ASSERT_EQ(s.result.rows.size(), 2u);
  for (const auto& row : s.result.rows) {
    EXPECT_NEAR(row.lhs, base.rows.back().lhs, 1e-13);
    EXPECT_NEAR(row.rhs, base.rows[0].rhs, 1e-13);
  }
  EXPECT_EQ(s.cauchy[0], 0.0);
}

TEST(Clipping, PinchedEigenvalueConvergesMonotonically) {
  auto c = small(1, 1, 32, 8.0, RegionKind::kPinch, 0.0);
  c.perturbation.radius = 1.0;
  c.perturbation.floor = 1e-6;
  std::vector<int> levels;
  for (int n = 1; n <= (1 << 21); n *= 4) levels.push_back(n);
  const auto s = clipping_study(c, levels);
  EXPECT_TRUE(s.result.passed());
  EXPECT_GT(s.threshold, 1.0);
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i - 1] >= s.threshold) {
      EXPECT_LE(s.cauchy[i], s.cauchy[i - 1]);
    }
  EXPECT_EQ(s.cauchy.back(), 0.0);
  EXPECT_NE(find(s.result, "cauchy_decrease"), nullptr);
}

TEST(Refinement, ConstantFieldStaysZero) {
  auto c = small(1, 1, 16, 8.0, RegionKind::kNone, 0.0);
  const auto s = refinement_study(c, {16, 32, 64});
  for (double v : s.lhs[0]) EXPECT_LT(v, 1e-12);
  EXPECT_TRUE(s.result.passed());
}

TEST(Refinement, SmoothBumpStabilizes) {
  auto c = small(1, 1, 32, 16.0, RegionKind::kBump, 0.5);
  c.perturbation.radius = 2.0;
  const auto s = refinement_study(c, {32, 64, 128, 256});
  EXPECT_TRUE(s.result.passed());
  const auto* shrink = find(s.result, "refinement_change_shrink");
  ASSERT_NE(shrink, nullptr);
  EXPECT_TRUE(shrink->at_least);
  const auto* variation = find(s.result, "refinement_ratio_variation");
  ASSERT_NE(variation, nullptr);
  EXPECT_LT(variation->value, 0.02);
  EXPECT_THROW(refinement_study(c, {64, 32}), InvalidArgument);
}

TEST(Battery, DeterministicAndThreadIndependent) {
  std::vector<ExperimentConfig> battery;
  for (auto kind : {RegionKind::kBox, RegionKind::kBall, RegionKind::kBump}) {
    auto c = small(1, 1, 32, 8.0, kind, 0.5);
    c.perturbation.radius = 1.0;
    c.id = "k" + std::to_string(battery.size());
    battery.push_back(c);
  }
  auto csv = [&] {
    std::ostringstream out;
    write_csv(out, verify_battery(battery).rows);
    return out.str();
  };
  ::setenv("SCHATTEN_THREADS", "1", 1);
  const std::string one = csv();
  ::setenv("SCHATTEN_THREADS", "3", 1);
  const std::string three = csv();
  ::unsetenv("SCHATTEN_THREADS");
  EXPECT_EQ(one, three);
  EXPECT_EQ(one, csv());
  EXPECT_EQ(one.rfind(std::string(kCsvHeader), 0), 0u);
}

TEST(Report, CsvRoundTrip) {
  ReportRow row;
  row.experiment = "x_vol=0.25";
  row.p = kInfinity;
  row.lhs = 0.1 + 0.2;
  row.rhs = 1e-300;
  row.constant = 0.25;
  row.ratio = std::numeric_limits<double>::infinity();
  row.factorization_residual = 3.3e-14;
  row.deift_residual = 0.0;
  row.n = 64;
  row.side = 16.0;
  row.seconds = 1.5;
  std::stringstream ss;
  write_csv(ss, {row, row});
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].experiment, row.experiment);
  EXPECT_TRUE(std::isinf(back[0].p));
  EXPECT_EQ(back[0].lhs, row.lhs);
  EXPECT_EQ(back[0].rhs, row.rhs);
  EXPECT_EQ(back[0].factorization_residual, row.factorization_residual);
  EXPECT_EQ(back[0].n, 64);
  std::stringstream bad("experiment,p\nfoo,1\n");
  EXPECT_THROW(read_csv(bad), InvalidArgument);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(4, [](std::size_t i) {
                 if (i == 2) throw InvalidArgument("boom");
               }),
               InvalidArgument);
}

}  // namespace
}  // namespace schatten
