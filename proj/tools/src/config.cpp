#include "schatten/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace schatten::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string kind_name(const json& j) { return j.type_name(); }

// View of a JSON object that rejects keys outside `allowed`.
class Object {
 public:
  Object(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object, got " + kind_name(j));
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) fail(child(key), "unknown key");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const {
    if (!has(key)) fail(child(key), "missing required key");
    return j_.at(key);
  }
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
};

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + kind_name(j));
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer, got " + kind_name(j));
  return j.get<long long>();
}

long long as_positive(const json& j, const std::string& path) {
  const long long v = as_integer(j, path);
  if (v <= 0) fail(path, "must be positive");
  return v;
}

std::uint64_t as_seed(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string, got " + kind_name(j));
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path, bool non_empty = true) {
  if (!j.is_array()) fail(path, "expected an array, got " + kind_name(j));
  if (non_empty && j.empty()) fail(path, "must not be empty");
  return j;
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::vector<double> number_list(const json& j, const std::string& path) {
  std::vector<double> out;
  const json& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_number(arr[i], index_path(path, i)));
  return out;
}

std::vector<int> positive_list(const json& j, const std::string& path) {
  std::vector<int> out;
  const json& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const long long v = as_positive(arr[i], index_path(path, i));
    if (v > (1LL << 30)) fail(index_path(path, i), "too large");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

Eigen::MatrixXd real_matrix(const json& j, const std::string& path) {
  const json& rows = as_array(j, path);
  const std::size_t r = rows.size();
  std::size_t c = 0;
  for (std::size_t i = 0; i < r; ++i) {
    const json& row = as_array(rows[i], index_path(path, i));
    if (i == 0) c = row.size();
    if (row.size() != c) fail(index_path(path, i), "ragged matrix row");
  }
  Eigen::MatrixXd m(static_cast<Index>(r), static_cast<Index>(c));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k)
      m(static_cast<Index>(i), static_cast<Index>(k)) =
          as_number(rows[i][k], index_path(index_path(path, i), k));
  return m;
}

// [[...]] for a real matrix or {"re": [[...]], "im": [[...]]}.
CMatrix complex_matrix(const json& j, const std::string& path) {
  if (j.is_array()) return real_matrix(j, path).cast<Complex>();
  Object o(j, path, {"re", "im"});
  const Eigen::MatrixXd re = real_matrix(o.at("re"), o.child("re"));
  CMatrix m = re.cast<Complex>();
  if (o.has("im")) {
    const Eigen::MatrixXd im = real_matrix(o.at("im"), o.child("im"));
    if (im.rows() != re.rows() || im.cols() != re.cols()) fail(o.child("im"), "shape differs from re");
    m.imag() = im;
  }
  return m;
}

json matrix_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  bool complex = false;
  for (Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
      complex = complex || m(i, k).imag() != 0.0;
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  if (!complex) return re;
  return json{{"re", re}, {"im", im}};
}

void read_tolerances(const json& j, const std::string& path, Tolerances& t) {
  Object o(j, path,
           {"ratio_slack", "factorization", "deift", "refinement_variation", "refinement_shrink", "indicator_law",
            "slope"});
  const std::pair<const char*, double*> fields[] = {
      {"ratio_slack", &t.ratio_slack},
      {"factorization", &t.factorization},
      {"deift", &t.deift},
      {"refinement_variation", &t.refinement_variation},
      {"refinement_shrink", &t.refinement_shrink},
      {"indicator_law", &t.indicator_law},
      {"slope", &t.slope},
  };
  for (const auto& [key, target] : fields) {
    if (!o.has(key)) continue;
    const double v = as_number(o.at(key), o.child(key));
    if (!(v >= 0.0) || !std::isfinite(v)) fail(o.child(key), "must be finite and non-negative");
    *target = v;
  }
}

json tolerances_json(const Tolerances& t) {
  return json{{"ratio_slack", t.ratio_slack},
              {"factorization", t.factorization},
              {"deift", t.deift},
              {"refinement_variation", t.refinement_variation},
              {"refinement_shrink", t.refinement_shrink},
              {"indicator_law", t.indicator_law},
              {"slope", t.slope}};
}

const std::map<std::string, RegionKind> kRegionKinds = {
    {"none", RegionKind::kNone}, {"box", RegionKind::kBox},   {"ball", RegionKind::kBall},
    {"cells", RegionKind::kCells}, {"bump", RegionKind::kBump}, {"pinch", RegionKind::kPinch},
};

std::string region_name(RegionKind k) {
  for (const auto& [name, kind] : kRegionKinds)
    if (kind == k) return name;
  return "none";
}

std::vector<double> axis_values(const json& j, const std::string& path, int dimension) {
  if (j.is_number()) return std::vector<double>(static_cast<std::size_t>(dimension), as_number(j, path));
  std::vector<double> v = number_list(j, path);
  if (v.size() != static_cast<std::size_t>(dimension))
    fail(path, "expected " + std::to_string(dimension) + " entries, got " + std::to_string(v.size()));
  return v;
}

PerturbationSpec read_perturbation(const json& j, const std::string& path, int dimension) {
  Object o(j, path, {"kind", "center", "half_width", "radius", "cells", "amplitude", "floor", "ceiling"});
  PerturbationSpec spec;
  const std::string kind = as_string(o.at("kind"), o.child("kind"));
  const auto it = kRegionKinds.find(kind);
  if (it == kRegionKinds.end())
    fail(o.child("kind"), "unknown kind '" + kind + "' (none, box, ball, cells, bump, pinch)");
  spec.kind = it->second;

  auto require = [&](const char* key) {
    if (!o.has(key)) fail(o.child(key), "required for kind '" + kind + "'");
  };
  if (o.has("center")) spec.center = axis_values(o.at("center"), o.child("center"), dimension);
  if (o.has("half_width")) {
    spec.half_width = axis_values(o.at("half_width"), o.child("half_width"), dimension);
    for (double w : spec.half_width)
      if (!(w >= 0.0)) fail(o.child("half_width"), "must be non-negative");
  }
  if (o.has("radius")) {
    spec.radius = as_number(o.at("radius"), o.child("radius"));
    if (!(spec.radius > 0.0)) fail(o.child("radius"), "must be positive");
  }
  if (o.has("cells")) spec.cells = static_cast<std::size_t>(as_positive(o.at("cells"), o.child("cells")));
  if (o.has("amplitude")) {
    const json& amp = o.at("amplitude");
    if (amp.is_number())
      spec.amplitude_scale = amp.get<double>();
    else
      spec.amplitude_matrix = complex_matrix(amp, o.child("amplitude"));
  }
  if (o.has("floor")) {
    spec.floor = as_number(o.at("floor"), o.child("floor"));
    if (!(spec.floor > 0.0)) fail(o.child("floor"), "must be positive");
  }
  if (o.has("ceiling")) spec.ceiling = as_number(o.at("ceiling"), o.child("ceiling"));

  switch (spec.kind) {
    case RegionKind::kBox:
      require("half_width");
      require("amplitude");
      break;
    case RegionKind::kBall:
    case RegionKind::kBump:
      require("radius");
      require("amplitude");
      break;
    case RegionKind::kCells:
      require("cells");
      require("amplitude");
      break;
    case RegionKind::kPinch:
      require("radius");
      break;
    case RegionKind::kNone:
      break;
  }
  return spec;
}

json perturbation_json(const PerturbationSpec& p) {
  json j{{"kind", region_name(p.kind)}};
  if (!p.center.empty()) j["center"] = p.center;
  switch (p.kind) {
    case RegionKind::kBox:
      j["half_width"] = p.half_width;
      break;
    case RegionKind::kBall:
    case RegionKind::kBump:
      j["radius"] = p.radius;
      break;
    case RegionKind::kCells:
      j["cells"] = p.cells;
      break;
    case RegionKind::kPinch:
      j["radius"] = p.radius;
      j["floor"] = p.floor;
      j["ceiling"] = p.ceiling;
      break;
    case RegionKind::kNone:
      break;
  }
  if (p.kind != RegionKind::kNone && p.kind != RegionKind::kPinch) {
    if (p.amplitude_matrix)
      j["amplitude"] = matrix_json(*p.amplitude_matrix);
    else
      j["amplitude"] = p.amplitude_scale;
  }
  return j;
}

ExperimentConfig read_experiment(const json& j, const std::string& path, const HarnessConfig& global,
                                 const Overrides& overrides) {
  Object o(j, path, {"id", "N", "m", "grid", "base", "perturbation", "p", "seed", "volume_samples", "tolerances"});
  ExperimentConfig cfg;
  cfg.id = as_string(o.at("id"), o.child("id"));
  if (cfg.id.empty()) fail(o.child("id"), "must not be empty");
  cfg.dimension = static_cast<int>(as_positive(o.at("N"), o.child("N")));
  cfg.half_order = static_cast<int>(as_positive(o.at("m"), o.child("m")));
  if (cfg.dimension > 3) fail(o.child("N"), "dimensions above 3 are not supported");
  if (cfg.half_order > 4) fail(o.child("m"), "orders above 4 are not supported");

  {
    Object g(o.at("grid"), o.child("grid"), {"n", "L"});
    const long long n = as_positive(g.at("n"), g.child("n"));
    if (n % 2 != 0) fail(g.child("n"), "must be even");
    if (n > 4096) fail(g.child("n"), "too large");
    cfg.n = static_cast<int>(n);
    cfg.side = as_number(g.at("L"), g.child("L"));
    if (!(cfg.side > 0.0) || !std::isfinite(cfg.side)) fail(g.child("L"), "must be positive");
  }

  if (o.has("base")) {
    Object b(o.at("base"), o.child("base"), {"kind", "matrix"});
    const std::string kind = as_string(b.at("kind"), b.child("kind"));
    if (kind == "polyharmonic") {
      cfg.base.kind = BaseKind::kPolyharmonic;
      if (b.has("matrix")) fail(b.child("matrix"), "not allowed for kind 'polyharmonic'");
    } else if (kind == "explicit") {
      cfg.base.kind = BaseKind::kExplicit;
      cfg.base.matrix = complex_matrix(b.at("matrix"), b.child("matrix"));
    } else {
      fail(b.child("kind"), "unknown kind '" + kind + "' (polyharmonic, explicit)");
    }
  }

  if (o.has("perturbation"))
    cfg.perturbation = read_perturbation(o.at("perturbation"), o.child("perturbation"), cfg.dimension);

  cfg.p_values = number_list(o.at("p"), o.child("p"));
  for (std::size_t i = 0; i < cfg.p_values.size(); ++i)
    if (!(cfg.p_values[i] >= 1.0) || !std::isfinite(cfg.p_values[i]))
      fail(index_path(o.child("p"), i), "p must be finite and at least 1");

  cfg.seed = o.has("seed") ? as_seed(o.at("seed"), o.child("seed")) : global.seed;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (o.has("volume_samples"))
    cfg.volume_samples = static_cast<std::uint64_t>(as_positive(o.at("volume_samples"), o.child("volume_samples")));
  cfg.max_dim = global.max_dim;
  cfg.tolerances = global.tolerances;
  if (o.has("tolerances")) read_tolerances(o.at("tolerances"), o.child("tolerances"), cfg.tolerances);
  cfg.record_time = overrides.record_time;

  // Shape checks that only need the basis size.
  const auto nu = static_cast<Index>(basis_size(cfg.dimension, cfg.half_order));
  if (cfg.base.kind == BaseKind::kExplicit && (cfg.base.matrix.rows() != nu || cfg.base.matrix.cols() != nu))
    fail(o.child("base") + ".matrix", "must be " + std::to_string(nu) + "x" + std::to_string(nu));
  if (cfg.perturbation.amplitude_matrix &&
      (cfg.perturbation.amplitude_matrix->rows() != nu || cfg.perturbation.amplitude_matrix->cols() != nu))
    fail(o.child("perturbation") + ".amplitude", "must be " + std::to_string(nu) + "x" + std::to_string(nu));
  return cfg;
}

// A study names its experiment by id or carries it inline.
ExperimentConfig study_experiment(const json& j, const std::string& path, const HarnessConfig& cfg,
                                  const Overrides& overrides) {
  if (j.is_string()) {
    const std::string id = j.get<std::string>();
    for (const auto& e : cfg.experiments)
      if (e.id == id) return e;
    fail(path, "no experiment with id '" + id + "'");
  }
  return read_experiment(j, path, cfg, overrides);
}

// A study section is an object or an array of objects.
template <class F>
void for_each_section(const json& j, const std::string& path, F&& f) {
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) f(j[i], index_path(path, i));
  } else {
    f(j, path);
  }
}

}  // namespace

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

HarnessConfig parse_config(const json& doc, const Overrides& overrides) {
  Object top(doc, "", {"seed", "max_dim", "tolerances", "experiments", "scaling", "clipping", "refinement"});
  HarnessConfig cfg;
  if (top.has("seed")) cfg.seed = as_seed(top.at("seed"), "seed");
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (top.has("max_dim")) cfg.max_dim = static_cast<Index>(as_positive(top.at("max_dim"), "max_dim"));
  if (overrides.max_dim) cfg.max_dim = *overrides.max_dim;
  if (top.has("tolerances")) read_tolerances(top.at("tolerances"), "tolerances", cfg.tolerances);

  if (top.has("experiments")) {
    const json& arr = as_array(top.at("experiments"), "experiments", false);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = index_path("experiments", i);
      cfg.experiments.push_back(read_experiment(arr[i], path, cfg, overrides));
      if (!ids.insert(cfg.experiments.back().id).second) fail(path + ".id", "duplicate id '" + cfg.experiments.back().id + "'");
    }
  }
  if (top.has("scaling"))
    for_each_section(top.at("scaling"), "scaling", [&](const json& j, const std::string& path) {
      Object o(j, path, {"experiment", "volumes"});
      ScalingSection s{study_experiment(o.at("experiment"), o.child("experiment"), cfg, overrides),
                       number_list(o.at("volumes"), o.child("volumes"))};
      for (std::size_t i = 0; i < s.volumes.size(); ++i) {
        if (!(s.volumes[i] > 0.0)) fail(index_path(o.child("volumes"), i), "must be positive");
        if (i > 0 && !(s.volumes[i] > s.volumes[i - 1])) fail(o.child("volumes"), "must be strictly increasing");
      }
      if (s.volumes.size() < 2) fail(o.child("volumes"), "needs at least two volumes");
      cfg.scaling.push_back(std::move(s));
    });
  if (top.has("clipping"))
    for_each_section(top.at("clipping"), "clipping", [&](const json& j, const std::string& path) {
      Object o(j, path, {"experiment", "levels"});
      cfg.clipping.push_back({study_experiment(o.at("experiment"), o.child("experiment"), cfg, overrides),
                              positive_list(o.at("levels"), o.child("levels"))});
    });
  if (top.has("refinement"))
    for_each_section(top.at("refinement"), "refinement", [&](const json& j, const std::string& path) {
      Object o(j, path, {"experiment", "n_list"});
      RefinementSection s{study_experiment(o.at("experiment"), o.child("experiment"), cfg, overrides),
                          positive_list(o.at("n_list"), o.child("n_list"))};
      if (s.grid_sizes.size() < 2) fail(o.child("n_list"), "needs at least two grids");
      for (std::size_t i = 0; i < s.grid_sizes.size(); ++i) {
        if (s.grid_sizes[i] % 2 != 0) fail(index_path(o.child("n_list"), i), "must be even");
        if (i > 0 && s.grid_sizes[i] <= s.grid_sizes[i - 1]) fail(o.child("n_list"), "must be strictly increasing");
      }
      cfg.refinement.push_back(std::move(s));
    });
  return cfg;
}

HarnessConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc, overrides);
}

json to_json(const ExperimentConfig& cfg) {
  json base{{"kind", cfg.base.kind == BaseKind::kPolyharmonic ? "polyharmonic" : "explicit"}};
  if (cfg.base.kind == BaseKind::kExplicit) base["matrix"] = matrix_json(cfg.base.matrix);
  return json{{"id", cfg.id},
              {"N", cfg.dimension},
              {"m", cfg.half_order},
              {"grid", {{"n", cfg.n}, {"L", cfg.side}}},
              {"base", base},
              {"perturbation", perturbation_json(cfg.perturbation)},
              {"p", cfg.p_values},
              {"seed", cfg.seed},
              {"volume_samples", cfg.volume_samples},
              {"tolerances", tolerances_json(cfg.tolerances)}};
}

json to_json(const HarnessConfig& cfg) {
  json experiments = json::array();
  for (const auto& e : cfg.experiments) experiments.push_back(to_json(e));
  json scaling = json::array(), clipping = json::array(), refinement = json::array();
  for (const auto& s : cfg.scaling) scaling.push_back({{"experiment", to_json(s.experiment)}, {"volumes", s.volumes}});
  for (const auto& s : cfg.clipping) clipping.push_back({{"experiment", to_json(s.experiment)}, {"levels", s.levels}});
  for (const auto& s : cfg.refinement)
    refinement.push_back({{"experiment", to_json(s.experiment)}, {"n_list", s.grid_sizes}});
  return json{{"seed", cfg.seed},
              {"max_dim", cfg.max_dim},
              {"tolerances", tolerances_json(cfg.tolerances)},
              {"experiments", experiments},
              {"scaling", scaling},
              {"clipping", clipping},
              {"refinement", refinement}};
}

}  // namespace schatten::cli
