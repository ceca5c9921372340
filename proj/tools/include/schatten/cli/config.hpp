#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "schatten/experiment.hpp"

namespace schatten::cli {

/// Malformed or inconsistent configuration; the message starts with the JSON
/// path of the offending entry, e.g. "experiments[2].perturbation.kind".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScalingSection {
  ExperimentConfig experiment;
  std::vector<double> volumes;
};

struct ClippingSection {
  ExperimentConfig experiment;
  std::vector<int> levels;
};

struct RefinementSection {
  ExperimentConfig experiment;
  std::vector<int> grid_sizes;
};

struct HarnessConfig {
  std::uint64_t seed = 0;
  Index max_dim = kDefaultMaxDim;
  Tolerances tolerances;
  std::vector<ExperimentConfig> experiments;
  std::vector<ScalingSection> scaling;
  std::vector<ClippingSection> clipping;
  std::vector<RefinementSection> refinement;
};

/// Command-line values that replace the corresponding config entries.
/// A seed override also replaces per-experiment seeds.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<Index> max_dim;
  bool record_time = false;
};

HarnessConfig parse_config(const nlohmann::json& doc, const Overrides& overrides = {});

/// Reads and parses a config file; I/O and syntax problems become ConfigError.
HarnessConfig load_config(const std::string& path, const Overrides& overrides = {});

/// The resolved configuration, in the same schema parse_config accepts.
nlohmann::json to_json(const HarnessConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// JSON number for finite x, else the strings "inf", "-inf" or "nan".
nlohmann::json number(double x);

}  // namespace schatten::cli
