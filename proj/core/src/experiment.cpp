#include "schatten/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "schatten/errors.hpp"
#include "schatten/report.hpp"
#include "schatten/schatten.hpp"

namespace schatten {

bool StudyResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

void StudyResult::append(StudyResult other) {
  const std::size_t offset = rows.size();
  for (auto& r : other.rows) rows.push_back(std::move(r));
  for (auto& a : other.assertions) {
    if (a.row) *a.row += offset;
    assertions.push_back(std::move(a));
  }
}

TorusGrid make_grid(const ExperimentConfig& cfg) { return TorusGrid(cfg.dimension, cfg.n, cfg.side); }

MultiIndexBasis make_basis(const ExperimentConfig& cfg) { return enumerate_basis(cfg.dimension, cfg.half_order); }

CMatrix base_matrix(const ExperimentConfig& cfg) {
  const MultiIndexBasis basis = make_basis(cfg);
  if (cfg.base.kind == BaseKind::kPolyharmonic) return polyharmonic_coefficients(basis);
  const auto nu = static_cast<Index>(basis.size());
  if (cfg.base.matrix.rows() != nu || cfg.base.matrix.cols() != nu)
    throw InvalidArgument(cfg.id + ": explicit base matrix must be " + std::to_string(nu) + "x" + std::to_string(nu));
  if (hermitian_residual(cfg.base.matrix) > 1e-12) throw InvalidArgument(cfg.id + ": base matrix is not Hermitian");
  const double lo = min_eigenvalue(cfg.base.matrix);
  if (lo <= 0.0) throw NonPositiveDefinite(lo);
  return cfg.base.matrix;
}

namespace {

constexpr double kGeometryTol = 1e-12;

std::vector<double> center_of(const PerturbationSpec& spec, const TorusGrid& grid) {
  std::vector<double> c = spec.center;
  if (c.empty()) c.assign(static_cast<std::size_t>(grid.dimension()), 0.0);
  if (c.size() != static_cast<std::size_t>(grid.dimension()))
    throw InvalidArgument("perturbation center has wrong dimension");
  return c;
}

double squared_length(const std::vector<double>& d) {
  return std::inner_product(d.begin(), d.end(), d.begin(), 0.0);
}

double bump(double r) { return r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; }

}  // namespace

std::vector<double> region_profile(const PerturbationSpec& spec, const TorusGrid& grid) {
  const std::size_t M = grid.size();
  std::vector<double> phi(M, 0.0);
  if (spec.kind == RegionKind::kNone) return phi;
  const auto c = center_of(spec, grid);

  switch (spec.kind) {
    case RegionKind::kBox: {
      if (spec.half_width.size() != c.size()) throw InvalidArgument("box half_width has wrong dimension");
      for (std::size_t x = 0; x < M; ++x) {
        const auto d = grid.displacement(x, c);
        bool inside = true;
        for (std::size_t i = 0; i < d.size(); ++i) inside = inside && std::abs(d[i]) <= spec.half_width[i] + kGeometryTol;
        phi[x] = inside ? 1.0 : 0.0;
      }
      break;
    }
    case RegionKind::kBall:
    case RegionKind::kPinch: {
      if (!(spec.radius > 0.0)) throw InvalidArgument("ball radius must be positive");
      for (std::size_t x = 0; x < M; ++x)
        phi[x] = std::sqrt(squared_length(grid.displacement(x, c))) <= spec.radius + kGeometryTol ? 1.0 : 0.0;
      break;
    }
    case RegionKind::kBump: {
      if (!(spec.radius > 0.0)) throw InvalidArgument("bump radius must be positive");
      for (std::size_t x = 0; x < M; ++x)
        phi[x] = bump(std::sqrt(squared_length(grid.displacement(x, c))) / spec.radius);
      break;
    }
    case RegionKind::kCells: {
      if (spec.cells > M) throw InvalidArgument("more impurity cells than grid samples");
      std::vector<std::size_t> order(M);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::vector<double> dist(M);
      for (std::size_t x = 0; x < M; ++x) dist[x] = squared_length(grid.displacement(x, c));
      std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return dist[i] < dist[j]; });
      for (std::size_t k = 0; k < spec.cells; ++k) phi[order[k]] = 1.0;
      break;
    }
    case RegionKind::kNone:
      break;
  }
  return phi;
}

double region_volume(const PerturbationSpec& spec, const TorusGrid& grid) {
  const auto phi = region_profile(spec, grid);
  const auto count = std::count_if(phi.begin(), phi.end(), [](double v) { return v != 0.0; });
  return static_cast<double>(count) * grid.cell_volume();
}

HermitianMatrixField perturbed_field(const ExperimentConfig& cfg, const TorusGrid& grid, const CMatrix& a) {
  const MultiIndexBasis basis = make_basis(cfg);
  const auto& spec = cfg.perturbation;
  const auto phi = region_profile(spec, grid);
  std::vector<CMatrix> samples(grid.size(), a);

  if (spec.kind == RegionKind::kPinch) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    RVector lambda = es.eigenvalues();
    lambda(0) = spec.floor;
    if (spec.ceiling > 0.0) lambda(lambda.size() - 1) = spec.ceiling;
    CMatrix pinched = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
    pinched = 0.5 * (pinched + pinched.adjoint());
    for (std::size_t x = 0; x < grid.size(); ++x)
      if (phi[x] != 0.0) samples[x] = pinched;
    return HermitianMatrixField::sampled(basis, std::move(samples));
  }

  const CMatrix b = spec.amplitude_matrix ? *spec.amplitude_matrix : CMatrix(spec.amplitude_scale * a);
  if (b.rows() != a.rows() || b.cols() != a.cols()) throw InvalidArgument(cfg.id + ": amplitude matrix has wrong size");
  if (hermitian_residual(b) > 1e-12) throw InvalidArgument(cfg.id + ": amplitude matrix is not Hermitian");
  for (std::size_t x = 0; x < grid.size(); ++x)
    if (phi[x] != 0.0) samples[x] = a + phi[x] * b;
  auto field = HermitianMatrixField::sampled(basis, std::move(samples));
  field.require_positive_definite();
  return field;
}

BoundConstants bound_constants(const ExperimentConfig& cfg) {
  const MultiIndexBasis basis = make_basis(cfg);
  BoundConstants out;
  if (cfg.base.kind == BaseKind::kPolyharmonic) {
    out.sublevel_volume = unit_ball_volume(cfg.dimension);
  } else {
    out.sublevel_volume =
        sublevel_volume(matrix_sqrt(base_matrix(cfg)), basis, cfg.volume_samples, cfg.seed, worker_threads()).value;
  }
  out.coarea = coarea_constant_from_volume(out.sublevel_volume, cfg.dimension, cfg.half_order);
  for (double p : cfg.p_values) {
    out.p_values.push_back(p);
    const auto gs = closed_form_g_star({p, cfg.dimension, cfg.half_order});
    out.g_star.push_back(gs);
    out.constant.push_back(gs.is_divergent() ? kInfinity : 0.5 * std::pow(out.coarea, 1.0 / p) * gs.value());
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0, bool record) {
  return record ? std::chrono::duration<double>(Clock::now() - t0).count() : 0.0;
}

Assertion upper_bound(std::string name, const std::string& experiment, std::optional<std::size_t> row,
                      double value, double threshold) {
  return Assertion{std::move(name), experiment, row, value, threshold, value <= threshold};
}

double deift_for(const HermitianMatrixField& coeff, const TorusGrid& grid, Index max_dim) {
  return deift_residual(materialize(assemble_T(sqrt_field(coeff), grid), max_dim));
}

// Rows and checks for one coefficient pair (a, a~).
StudyResult analyse_pair(const ExperimentConfig& cfg, const TorusGrid& grid, const CMatrix& a,
                         const HermitianMatrixField& a_tilde, const BoundConstants& consts,
                         Clock::time_point t0) {
  const auto a_field = HermitianMatrixField::constant(a_tilde.basis(), a);
  const ResolventPair pair = assemble_resolvents(a_field, a_tilde, grid, cfg.max_dim);
  const CMatrix delta = pair.difference();
  const SingularSpectrum spectrum = singular_spectrum(delta);
  const PerturbationField V = perturbation_V(a, a_tilde, grid);

  const double fact = factorization_residual(delta, factorization_chain(a_field, a_tilde, grid, cfg.max_dim));
  const double deift = std::max(deift_for(a_field, grid, cfg.max_dim), deift_for(a_tilde, grid, cfg.max_dim));

  StudyResult out;
  const double slack = 1.0 + cfg.tolerances.ratio_slack;
  for (std::size_t i = 0; i < consts.p_values.size(); ++i) {
    const double p = consts.p_values[i];
    ReportRow row;
    row.experiment = cfg.id;
    row.p = p;
    row.lhs = schatten_norm(spectrum, p);
    row.rhs = lp_matrix_field_norm(V, p);
    row.constant = consts.constant[i];
    row.ratio = bound_ratio(row.lhs, row.constant, row.rhs);
    row.factorization_residual = fact;
    row.deift_residual = deift;
    row.n = grid.points_per_axis();
    row.side = grid.side();
    out.rows.push_back(row);
    if (std::isfinite(row.constant))
      out.assertions.push_back(upper_bound("schatten_bound_ratio", cfg.id, out.rows.size() - 1, row.ratio, slack));
  }

  ReportRow op;
  op.experiment = cfg.id;
  op.p = kInfinity;
  op.lhs = spectrum.values.empty() ? 0.0 : spectrum.values.front();
  op.rhs = lp_matrix_field_norm(V, kInfinity);
  op.constant = 0.25;
  op.ratio = bound_ratio(op.lhs, op.constant, op.rhs);
  op.factorization_residual = fact;
  op.deift_residual = deift;
  op.n = grid.points_per_axis();
  op.side = grid.side();
  out.rows.push_back(op);
  const std::size_t op_row = out.rows.size() - 1;
  out.assertions.push_back(upper_bound("operator_bound_ratio", cfg.id, op_row, op.ratio, slack));
  out.assertions.push_back(upper_bound("factorization_residual", cfg.id, op_row, fact, cfg.tolerances.factorization));
  out.assertions.push_back(upper_bound("deift_residual", cfg.id, op_row, deift, cfg.tolerances.deift));

  const double secs = elapsed(t0, cfg.record_time);
  for (auto& r : out.rows) r.seconds = secs;
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

StudyResult impurity_experiment(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const TorusGrid grid = make_grid(cfg);
  const CMatrix a = base_matrix(cfg);
  const HermitianMatrixField a_tilde = perturbed_field(cfg, grid, a);
  return analyse_pair(cfg, grid, a, a_tilde, bound_constants(cfg), t0);
}

StudyResult verify_battery(const std::vector<ExperimentConfig>& battery) {
  std::vector<StudyResult> parts(battery.size());
  parallel_for(battery.size(), [&](std::size_t i) { parts[i] = impurity_experiment(battery[i]); });
  StudyResult out;
  for (auto& p : parts) out.append(std::move(p));
  return out;
}

ScalingSummary volume_scaling_study(const ExperimentConfig& cfg, const std::vector<double>& volumes) {
  if (volumes.size() < 2) throw InvalidArgument("volume sweep needs at least two volumes");
  for (std::size_t i = 1; i < volumes.size(); ++i)
    if (!(volumes[i] > volumes[i - 1])) throw InvalidArgument("volumes must be strictly increasing");
  const TorusGrid grid = make_grid(cfg);
  const double cell = grid.cell_volume();

  std::vector<ExperimentConfig> sweep;
  for (double vol : volumes) {
    const double k = std::round(vol / cell);
    if (k < 1.0 || std::abs(k * cell - vol) > 1e-9 * vol || k > static_cast<double>(grid.size()))
      throw InvalidArgument("volume " + format_double(vol) + " is not a whole number of grid cells");
    ExperimentConfig c = cfg;
    c.id = cfg.id + "_vol=" + format_double(vol);
    c.perturbation.kind = RegionKind::kCells;
    c.perturbation.cells = static_cast<std::size_t>(k);
    sweep.push_back(std::move(c));
  }

  ScalingSummary summary;
  summary.volumes = volumes;
  std::vector<StudyResult> parts(sweep.size());
  parallel_for(sweep.size(), [&](std::size_t i) { parts[i] = impurity_experiment(sweep[i]); });

  // V is constant on U, so ||V||_p = |V_U| |U|^{1/p} exactly.
  const CMatrix a = base_matrix(cfg);
  const auto center_field = perturbed_field(sweep.front(), grid, a);
  const auto V = perturbation_V(a, center_field, grid);
  const auto norms = pointwise_operator_norms(V);
  const double v_on_u = *std::max_element(norms.begin(), norms.end());

  const std::size_t np = cfg.p_values.size();
  std::vector<std::vector<double>> log_rhs(np), log_lhs(np);
  std::vector<double> log_vol;
  for (std::size_t j = 0; j < sweep.size(); ++j) {
    const std::size_t offset = summary.result.rows.size();
    log_vol.push_back(std::log(volumes[j]));
    for (std::size_t i = 0; i < np; ++i) {
      const ReportRow& row = parts[j].rows[i];
      log_rhs[i].push_back(std::log(row.rhs));
      log_lhs[i].push_back(std::log(row.lhs));
      const double law = v_on_u * std::pow(volumes[j], 1.0 / row.p);
      summary.result.assertions.push_back(upper_bound("indicator_law", row.experiment, offset + i,
                                                      std::abs(row.rhs - law) / law,
                                                      cfg.tolerances.indicator_law));
      summary.result.assertions.push_back(
          upper_bound("scaling_bound_ratio", row.experiment, offset + i, row.ratio, 1.0));
    }
    summary.result.append(std::move(parts[j]));
  }
  for (std::size_t i = 0; i < np; ++i) {
    summary.rhs_slopes.push_back(fit_slope(log_vol, log_rhs[i]));
    summary.lhs_slopes.push_back(fit_slope(log_vol, log_lhs[i]));
    summary.result.assertions.push_back(upper_bound("rhs_slope_minus_inverse_p", cfg.id + "_p=" + format_double(cfg.p_values[i]),
                                                    std::nullopt,
                                                    std::abs(summary.rhs_slopes[i] - 1.0 / cfg.p_values[i]),
                                                    cfg.tolerances.slope));
  }
  return summary;
}

ClippingSummary clipping_study(const ExperimentConfig& cfg, const std::vector<int>& levels) {
  if (levels.empty()) throw InvalidArgument("clipping study needs at least one level");
  if (cfg.p_values.empty()) throw InvalidArgument("clipping study needs a p value");
  const auto t0 = Clock::now();
  const TorusGrid grid = make_grid(cfg);
  const CMatrix a = base_matrix(cfg);
  const HermitianMatrixField raw = perturbed_field(cfg, grid, a);
  const BoundConstants consts = bound_constants(cfg);
  const double p = consts.p_values.front();
  const double constant = consts.constant.front();
  const auto a_field = HermitianMatrixField::constant(raw.basis(), a);
  const CMatrix R = resolvent(assemble_H_const(a_field, grid), cfg.max_dim);

  ClippingSummary summary;
  summary.levels = levels;
  std::vector<StudyResult> parts(levels.size());
  std::vector<double> cauchy(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) {
    const int n = levels[i];
    ExperimentConfig c = cfg;
    c.id = cfg.id + "_clip=" + std::to_string(n);
    const HermitianMatrixField clipped = clip_coefficients(raw, n);
    const CMatrix Rn = resolvent(assemble_H_var(clipped, grid), cfg.max_dim);
    const CMatrix R2n = resolvent(assemble_H_var(clip_coefficients(raw, 2 * n), grid), cfg.max_dim);
    cauchy[i] = operator_norm(Rn - R2n);

    const auto V = perturbation_V(a, clipped, grid);
    const CMatrix diff = Rn - R;
    StudyResult part;
    ReportRow row;
    row.experiment = c.id;
    row.p = p;
    row.lhs = operator_norm(diff);
    row.rhs = lp_matrix_field_norm(V, p);
    row.constant = constant;
    row.ratio = bound_ratio(row.lhs, row.constant, row.rhs);
    row.factorization_residual = factorization_residual(diff, factorization_chain(a_field, clipped, grid, cfg.max_dim));
    row.deift_residual = deift_for(clipped, grid, cfg.max_dim);
    row.n = grid.points_per_axis();
    row.side = grid.side();
    row.seconds = elapsed(t0, cfg.record_time);
    part.rows.push_back(row);
    if (std::isfinite(constant))
      part.assertions.push_back(upper_bound("clipped_operator_bound_ratio", c.id, 0, row.ratio,
                                            1.0 + cfg.tolerances.ratio_slack));
    part.assertions.push_back(upper_bound("factorization_residual", c.id, 0, row.factorization_residual,
                                          cfg.tolerances.factorization));
    parts[i] = std::move(part);
  });
  for (auto& part : parts) summary.result.append(std::move(part));
  summary.cauchy = cauchy;

  // Monotone Cauchy differences once the clip window [1/n, n] covers both the
  // top of the spectrum of a~ and the symbol range max A(xi) the grid resolves;
  // below that the lowered floor is still felt at resolved frequencies.
  double top = 0.0;
  for (const auto& m : raw.samples()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    top = std::max(top, es.eigenvalues()(es.eigenvalues().size() - 1));
  }
  const double symbol_range = 1.0 / min_eigenvalue(R) - 1.0;
  summary.threshold = std::max(top, symbol_range);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i - 1] < summary.threshold) continue;
    summary.result.assertions.push_back(upper_bound(
        "cauchy_decrease", cfg.id + "_clip=" + std::to_string(levels[i]), std::nullopt,
        cauchy[i] - cauchy[i - 1], 0.0));
  }
  return summary;
}

RefinementSummary refinement_study(const ExperimentConfig& cfg, const std::vector<int>& grid_sizes) {
  if (grid_sizes.size() < 2) throw InvalidArgument("refinement study needs at least two grids");
  for (std::size_t i = 1; i < grid_sizes.size(); ++i)
    if (grid_sizes[i] <= grid_sizes[i - 1]) throw InvalidArgument("grid sizes must increase");

  std::vector<ExperimentConfig> runs;
  for (int n : grid_sizes) {
    ExperimentConfig c = cfg;
    c.n = n;
    c.id = cfg.id + "_n=" + std::to_string(n);
    runs.push_back(std::move(c));
  }
  std::vector<StudyResult> parts(runs.size());
  parallel_for(runs.size(), [&](std::size_t i) { parts[i] = impurity_experiment(runs[i]); });

  RefinementSummary summary;
  summary.grid_sizes = grid_sizes;
  const std::size_t np = cfg.p_values.size();
  summary.lhs.assign(np, {});
  summary.ratio.assign(np, {});
  for (auto& part : parts) {
    for (std::size_t i = 0; i < np; ++i) {
      summary.lhs[i].push_back(part.rows[i].lhs);
      summary.ratio[i].push_back(part.rows[i].ratio);
    }
    summary.result.append(std::move(part));
  }

  const std::size_t last = grid_sizes.size() - 1;
  for (std::size_t i = 0; i < np; ++i) {
    const std::string tag = cfg.id + "_p=" + format_double(cfg.p_values[i]);
    const double top = summary.ratio[i][last];
    const double prev = summary.ratio[i][last - 1];
    const double variation = top == 0.0 ? std::abs(prev) : std::abs(top - prev) / top;
    summary.result.assertions.push_back(
        upper_bound("refinement_ratio_variation", tag, std::nullopt, variation, cfg.tolerances.refinement_variation));

    if (cfg.perturbation.kind != RegionKind::kBump) continue;
    // Smooth coefficients: successive lhs changes shrink by a fixed factor per doubling.
    for (std::size_t j = 2; j < grid_sizes.size(); ++j) {
      if (grid_sizes[j] != 2 * grid_sizes[j - 1] || grid_sizes[j - 1] != 2 * grid_sizes[j - 2]) continue;
      const double before = std::abs(summary.lhs[i][j - 1] - summary.lhs[i][j - 2]);
      const double after = std::abs(summary.lhs[i][j] - summary.lhs[i][j - 1]);
      const double shrink = after == 0.0 ? kInfinity : before / after;
      Assertion a{"refinement_change_shrink", tag + "_n=" + std::to_string(grid_sizes[j]), std::nullopt, shrink,
                  cfg.tolerances.refinement_shrink, shrink >= cfg.tolerances.refinement_shrink, true};
      summary.result.assertions.push_back(a);
    }
  }
  return summary;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("SCHATTEN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(worker_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace schatten
