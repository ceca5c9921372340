#include "schatten/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schatten/cli/config.hpp"
#include "schatten/errors.hpp"
#include "schatten/report.hpp"
#include "schatten/schatten.hpp"

namespace schatten::cli {

using nlohmann::json;

namespace {

// Failures detected before any heavy computation starts.
void preflight(const ExperimentConfig& cfg, const std::string& where) {
  try {
    const TorusGrid grid = make_grid(cfg);
    const auto nu = static_cast<Index>(basis_size(cfg.dimension, cfg.half_order));
    const auto dim = nu * static_cast<Index>(grid.size());
    if (dim > cfg.max_dim) throw DimensionCap(dim, cfg.max_dim);
    const CMatrix a = base_matrix(cfg);
    perturbed_field(cfg, grid, a);
  } catch (const Error& e) {
    throw ConfigError(where + " (" + cfg.id + "): " + e.what());
  }
}

json assertion_json(const Assertion& a) {
  return json{{"name", a.name},
              {"experiment", a.experiment},
              {"row", a.row ? json(*a.row) : json(nullptr)},
              {"value", number(a.value)},
              {"threshold", number(a.threshold)},
              {"comparison", a.at_least ? ">=" : "<="},
              {"passed", a.passed}};
}

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

struct Outcome {
  StudyResult result;
  json details = json::object();
};

Outcome run_verify(const HarnessConfig& cfg) {
  if (cfg.experiments.empty()) throw ConfigError("experiments: verify needs at least one experiment");
  for (std::size_t i = 0; i < cfg.experiments.size(); ++i)
    preflight(cfg.experiments[i], "experiments[" + std::to_string(i) + "]");
  return {verify_battery(cfg.experiments), json::object()};
}

Outcome run_scale(const HarnessConfig& cfg) {
  if (cfg.scaling.empty()) throw ConfigError("scaling: section missing");
  Outcome out;
  out.details["scaling"] = json::array();
  for (std::size_t i = 0; i < cfg.scaling.size(); ++i) {
    const auto& s = cfg.scaling[i];
    preflight(s.experiment, "scaling[" + std::to_string(i) + "].experiment");
    ScalingSummary summary = volume_scaling_study(s.experiment, s.volumes);
    out.details["scaling"].push_back({{"experiment", s.experiment.id},
                                      {"p", s.experiment.p_values},
                                      {"volumes", numbers(summary.volumes)},
                                      {"rhs_slopes", numbers(summary.rhs_slopes)},
                                      {"lhs_slopes", numbers(summary.lhs_slopes)}});
    out.result.append(std::move(summary.result));
  }
  return out;
}

Outcome run_clip(const HarnessConfig& cfg) {
  if (cfg.clipping.empty()) throw ConfigError("clipping: section missing");
  Outcome out;
  out.details["clipping"] = json::array();
  for (std::size_t i = 0; i < cfg.clipping.size(); ++i) {
    const auto& s = cfg.clipping[i];
    preflight(s.experiment, "clipping[" + std::to_string(i) + "].experiment");
    ClippingSummary summary = clipping_study(s.experiment, s.levels);
    out.details["clipping"].push_back({{"experiment", s.experiment.id},
                                       {"levels", summary.levels},
                                       {"cauchy", numbers(summary.cauchy)},
                                       {"monotone_from", number(summary.threshold)}});
    out.result.append(std::move(summary.result));
  }
  return out;
}

Outcome run_refine(const HarnessConfig& cfg) {
  if (cfg.refinement.empty()) throw ConfigError("refinement: section missing");
  Outcome out;
  out.details["refinement"] = json::array();
  for (std::size_t i = 0; i < cfg.refinement.size(); ++i) {
    const auto& s = cfg.refinement[i];
    for (int n : s.grid_sizes) {
      ExperimentConfig probe = s.experiment;
      probe.n = n;
      preflight(probe, "refinement[" + std::to_string(i) + "].n_list");
    }
    RefinementSummary summary = refinement_study(s.experiment, s.grid_sizes);
    json lhs = json::array(), ratio = json::array();
    for (const auto& v : summary.lhs) lhs.push_back(numbers(v));
    for (const auto& v : summary.ratio) ratio.push_back(numbers(v));
    out.details["refinement"].push_back({{"experiment", s.experiment.id},
                                         {"p", s.experiment.p_values},
                                         {"n_list", summary.grid_sizes},
                                         {"lhs", lhs},
                                         {"ratio", ratio}});
    out.result.append(std::move(summary.result));
  }
  return out;
}

json run_constants(const HarnessConfig& cfg, std::ostream& out) {
  std::vector<ExperimentConfig> all = cfg.experiments;
  for (const auto& s : cfg.scaling) all.push_back(s.experiment);
  for (const auto& s : cfg.clipping) all.push_back(s.experiment);
  for (const auto& s : cfg.refinement) all.push_back(s.experiment);
  if (all.empty()) throw ConfigError("experiments: nothing to evaluate");

  json table = json::array();
  out << "experiment,N,m,p,sublevel_volume,c_cov,g_star,constant\n";
  for (const auto& e : all) {
    BoundConstants c;
    try {
      c = bound_constants(e);
    } catch (const Error& err) {
      throw ConfigError(e.id + ": " + err.what());
    }
    json per_p = json::array();
    for (std::size_t i = 0; i < c.p_values.size(); ++i) {
      const bool divergent = c.g_star[i].is_divergent();
      const double g = divergent ? kInfinity : c.g_star[i].value();
      out << e.id << ',' << e.dimension << ',' << e.half_order << ',' << format_double(c.p_values[i]) << ','
          << format_double(c.sublevel_volume) << ',' << format_double(c.coarea) << ','
          << (divergent ? std::string("divergent") : format_double(g)) << ','
          << (divergent ? std::string("divergent") : format_double(c.constant[i])) << '\n';
      per_p.push_back({{"p", c.p_values[i]},
                       {"g_star", divergent ? json("divergent") : number(g)},
                       {"constant", divergent ? json("divergent") : number(c.constant[i])}});
    }
    table.push_back({{"experiment", e.id},
                     {"N", e.dimension},
                     {"m", e.half_order},
                     {"sublevel_volume", number(c.sublevel_volume)},
                     {"c_cov", number(c.coarea)},
                     {"constants", per_p}});
  }
  return table;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot open for writing");
  f << text;
  if (!f) throw ConfigError(path.string() + ": write failed");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resolvent-difference Schatten bounds on the periodic torus", "schatten"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<long long> max_dim;
  bool timings = false;

  const std::pair<const char*, const char*> commands[] = {
      {"verify", "Run the experiment battery against both resolvent bounds"},
      {"scale", "Sweep the impurity volume and check the indicator law"},
      {"clip", "Clip a degenerate coefficient field at increasing levels"},
      {"refine", "Repeat an experiment on successively finer grids"},
      {"constants", "Print sublevel volume, coarea constant and bound constants"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    subs.push_back(sub);
  }
  app.add_option("--config", config_path, "Configuration file (JSON)")->required();
  app.add_option("--out", out_dir, "Directory for the CSV and JSON reports");
  app.add_option("--seed", seed, "Seed replacing every seed in the config");
  app.add_option("--max-dim", max_dim, "Dense dimension cap")->check(CLI::PositiveNumber);
  app.add_flag("--timings", timings, "Record wall time per row (CSV no longer reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  std::string command;
  for (CLI::App* sub : subs)
    if (sub->parsed()) command = sub->get_name();

  Overrides overrides;
  overrides.seed = seed;
  if (max_dim) overrides.max_dim = static_cast<Index>(*max_dim);
  overrides.record_time = timings;

  try {
    const HarnessConfig cfg = load_config(config_path, overrides);
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError(out_dir + ": " + ec.message());

    json summary{{"subcommand", command}, {"config", to_json(cfg)}};
    if (command == "constants") {
      summary["constants"] = run_constants(cfg, out);
      summary["passed"] = true;
      write_file(dir / "constants.json", summary.dump(2) + "\n");
      return kExitPass;
    }

    Outcome outcome;
    if (command == "verify") outcome = run_verify(cfg);
    if (command == "scale") outcome = run_scale(cfg);
    if (command == "clip") outcome = run_clip(cfg);
    if (command == "refine") outcome = run_refine(cfg);

    std::ostringstream csv;
    write_csv(csv, outcome.result.rows);
    const std::string csv_name = command + ".csv";
    write_file(dir / csv_name, csv.str());

    json assertions = json::array();
    std::size_t failed = 0;
    for (const auto& a : outcome.result.assertions) {
      assertions.push_back(assertion_json(a));
      if (a.passed) continue;
      ++failed;
      err << "FAIL " << a.name << " [" << a.experiment << "]";
      if (a.row) err << " row " << *a.row;
      err << ": " << format_double(a.value) << (a.at_least ? " < " : " > ") << format_double(a.threshold) << '\n';
    }
    summary["csv"] = csv_name;
    summary["rows"] = outcome.result.rows.size();
    summary["passed"] = failed == 0;
    summary["assertions"] = assertions;
    summary.update(outcome.details);
    write_file(dir / (command + ".json"), summary.dump(2) + "\n");

    out << command << ": " << outcome.result.rows.size() << " rows, " << outcome.result.assertions.size()
        << " assertions, " << failed << " failed\n";
    return failed == 0 ? kExitPass : kExitAssertionFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace schatten::cli
