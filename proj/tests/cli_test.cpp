#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "schatten/cli/cli.hpp"
#include "schatten/cli/config.hpp"
#include "schatten/report.hpp"

namespace schatten::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("schatten_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& text, const std::string& name = "config.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  Outcome run(std::vector<std::string> args) {
    std::vector<const char*> argv{"schatten"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  std::string read(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

const char* kSmall = R"({
  "seed": 7,
  "experiments": [
    {"id": "box", "N": 1, "m": 1, "grid": {"n": 32, "L": 8},
     "perturbation": {"kind": "box", "half_width": 0.5, "amplitude": 0.5}, "p": [4, 6]},
    {"id": "bump", "N": 1, "m": 2, "grid": {"n": 32, "L": 8},
     "perturbation": {"kind": "bump", "radius": 1, "amplitude": -0.5}, "p": [4]}
  ],
  "scaling": {"experiment": "box", "volumes": [0.25, 0.5, 1, 2]},
  "clipping": {"experiment": {"id": "pinch", "N": 1, "m": 1, "grid": {"n": 16, "L": 8},
               "perturbation": {"kind": "pinch", "radius": 1, "floor": 1e-6}, "p": [4]},
               "levels": [1, 4, 16, 64, 256, 1024, 4096]},
  "refinement": {"experiment": {"id": "ref", "N": 1, "m": 1, "grid": {"n": 32, "L": 16},
                 "perturbation": {"kind": "bump", "radius": 2, "amplitude": 0.5}, "p": [4]},
                 "n_list": [32, 64, 128]}
})";

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, kExitPass); }

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitConfigError);
  EXPECT_EQ(run({"bogus", "--config", "x.json"}).code, kExitConfigError);
  EXPECT_EQ(run({"verify"}).code, kExitConfigError);
  EXPECT_EQ(run({"verify", "--config", write_config(kSmall), "--max-dim", "0"}).code, kExitConfigError);
}

TEST_F(Cli, MissingFileIsConfigError) {
  const auto r = run({"verify", "--config", (dir_ / "absent.json").string()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("absent.json"), std::string::npos);
}

TEST_F(Cli, MalformedJsonIsConfigError) {
  const auto r = run({"verify", "--config", write_config("{\"experiments\": [")});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("config error"), std::string::npos);
}

TEST_F(Cli, UnknownKeyNamesItsPath) {
  const auto r = run({"verify", "--config",
                      write_config(R"({"experiments": [{"id": "a", "N": 1, "m": 1, "grid": {"n": 8, "L": 4}, "p": [4],
                                       "perturbation": {"kind": "box", "half_width": 1, "amplitude": 0.5, "colour": 1}}]})")});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("experiments[0].perturbation.colour"), std::string::npos) << r.err;
}

TEST_F(Cli, InvalidValuesAreRejected) {
  for (const char* bad : {
           R"({"experiments": [{"id": "a", "N": 1, "m": 1, "grid": {"n": 7, "L": 4}, "p": [4]}]})",
           R"({"experiments": [{"id": "a", "N": 1, "m": 1, "grid": {"n": 8, "L": -1}, "p": [4]}]})",
           R"({"experiments": [{"id": "a", "N": 1, "m": 1, "grid": {"n": 8, "L": 4}, "p": [0.5]}]})",
           R"({"experiments": [{"id": "a", "N": 1, "m": 1, "grid": {"n": 8, "L": 4}, "p": [4]},
                               {"id": "a", "N": 1, "m": 1, "grid": {"n": 8, "L": 4}, "p": [4]}]})",
           R"({"experiments": [{"id": "a", "N": 1, "m": 1, "grid": {"n": 8, "L": 4}, "p": [4],
                                "perturbation": {"kind": "box"}}]})",
           R"({"experiments": [{"id": "a", "N": 2, "m": 1, "grid": {"n": 8, "L": 4}, "p": [4],
                                "base": {"kind": "explicit", "matrix": [[1]]}}]})",
       }) {
    const auto r = run({"verify", "--config", write_config(bad)});
    EXPECT_EQ(r.code, kExitConfigError) << bad;
    EXPECT_NE(r.err.find("experiments["), std::string::npos) << r.err;
    EXPECT_EQ(r.err.find("missing required key \"p\""), std::string::npos) << r.err;
    EXPECT_EQ(r.err.find(".p: missing"), std::string::npos) << r.err;
  }
}

TEST_F(Cli, NonPositiveDefiniteFieldNamesExperiment) {
  const auto r = run({"verify", "--config",
                      write_config(R"({"experiments": [{"id": "neg", "N": 1, "m": 1, "grid": {"n": 16, "L": 8}, "p": [4],
                                       "perturbation": {"kind": "box", "half_width": 1, "amplitude": -2}}]})")});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("experiments[0] (neg)"), std::string::npos) << r.err;
}

TEST_F(Cli, DimensionCapIsConfigError) {
  const auto r = run({"verify", "--config", write_config(kSmall), "--max-dim", "16"});
  EXPECT_EQ(r.code, kExitConfigError);
}

TEST_F(Cli, VerifyWritesConsistentReports) {
  const auto out = (dir_ / "out").string();
  const auto r = run({"verify", "--config", write_config(kSmall), "--out", out});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  EXPECT_NE(r.out.find("verify: 5 rows"), std::string::npos) << r.out;

  std::ifstream csv_file(dir_ / "out" / "verify.csv");
  std::string header;
  std::getline(csv_file, header);
  EXPECT_EQ(header, kCsvHeader);
  csv_file.seekg(0);
  const auto rows = read_csv(csv_file);
  ASSERT_EQ(rows.size(), 5u);

  const json doc = json::parse(read(dir_ / "out" / "verify.json"));
  EXPECT_EQ(doc["subcommand"], "verify");
  EXPECT_EQ(doc["rows"], 5);
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_EQ(doc["config"]["seed"], 7);

  // Each pass/fail flag is recomputed from the CSV row it names.
  const Tolerances tol;
  std::size_t checked = 0;
  for (const auto& a : doc["assertions"]) {
    if (a["row"].is_null()) continue;
    const auto& row = rows.at(a["row"].get<std::size_t>());
    EXPECT_EQ(a["experiment"], row.experiment);
    double value = 0.0, threshold = 0.0;
    const std::string name = a["name"];
    if (name == "schatten_bound_ratio" || name == "operator_bound_ratio") {
      value = row.ratio;
      threshold = 1.0 + tol.ratio_slack;
    } else if (name == "factorization_residual") {
      value = row.factorization_residual;
      threshold = tol.factorization;
    } else if (name == "deift_residual") {
      value = row.deift_residual;
      threshold = tol.deift;
    } else {
      continue;
    }
    EXPECT_EQ(a["value"].get<double>(), value) << name;
    EXPECT_EQ(a["threshold"].get<double>(), threshold) << name;
    EXPECT_EQ(a["passed"].get<bool>(), value <= threshold) << name;
    ++checked;
  }
  EXPECT_GE(checked, 5u);
}

TEST_F(Cli, CsvIsReproducibleAndSeedIsEchoed) {
  const auto cfg = write_config(kSmall);
  ASSERT_EQ(run({"verify", "--config", cfg, "--out", (dir_ / "a").string()}).code, kExitPass);
  ASSERT_EQ(run({"verify", "--config", cfg, "--out", (dir_ / "b").string(), "--seed", "99"}).code, kExitPass);
  EXPECT_EQ(read(dir_ / "a" / "verify.csv"), read(dir_ / "b" / "verify.csv"));
  const json doc = json::parse(read(dir_ / "b" / "verify.json"));
  EXPECT_EQ(doc["config"]["seed"], 99);
  for (const auto& e : doc["config"]["experiments"]) EXPECT_EQ(e["seed"], 99);
}

TEST_F(Cli, ZeroToleranceFailsWithExitOne) {
  const auto r = run({"verify", "--config",
                      write_config(R"({"tolerances": {"deift": 0},
                        "experiments": [{"id": "b", "N": 1, "m": 1, "grid": {"n": 32, "L": 8},
                        "perturbation": {"kind": "bump", "radius": 1, "amplitude": 0.5}, "p": [4]}]})"),
                      "--out", dir_.string()});
  EXPECT_EQ(r.code, kExitAssertionFailed);
  EXPECT_NE(r.err.find("FAIL deift_residual [b]"), std::string::npos) << r.err;
  const json doc = json::parse(read(dir_ / "verify.json"));
  EXPECT_FALSE(doc["passed"].get<bool>());
}

TEST_F(Cli, ConstantsTable) {
  const auto r = run({"constants", "--config",
                      write_config(R"({"experiments": [{"id": "d", "N": 2, "m": 1, "grid": {"n": 8, "L": 4}, "p": [2, 4]}]})"),
                      "--out", dir_.string()});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  EXPECT_NE(r.out.find("experiment,N,m,p,sublevel_volume,c_cov,g_star,constant"), std::string::npos);
  EXPECT_NE(r.out.find("d,2,1,2,"), std::string::npos);
  EXPECT_NE(r.out.find("divergent"), std::string::npos);
  EXPECT_NE(r.out.find(format_double(1.0 / (4 * std::numbers::pi))), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "constants.json"));
}

TEST_F(Cli, StudySubcommands) {
  const auto cfg = write_config(kSmall);
  for (const char* cmd : {"scale", "clip", "refine"}) {
    const auto r = run({cmd, "--config", cfg, "--out", dir_.string()});
    EXPECT_EQ(r.code, kExitPass) << cmd << ": " << r.err;
    EXPECT_TRUE(fs::exists(dir_ / (std::string(cmd) + ".csv")));
    const json doc = json::parse(read(dir_ / (std::string(cmd) + ".json")));
    EXPECT_TRUE(doc["passed"].get<bool>()) << cmd;
  }
  const json scale = json::parse(read(dir_ / "scale.json"));
  EXPECT_NEAR(scale["scaling"][0]["rhs_slopes"][0].get<double>(), 0.25, 1e-6);
  const json clip = json::parse(read(dir_ / "clip.json"));
  EXPECT_EQ(clip["clipping"][0]["levels"].size(), 7u);
}

TEST_F(Cli, StudyWithoutSectionIsConfigError) {
  const auto r = run({"clip", "--config",
                      write_config(R"({"experiments": [{"id": "a", "N": 1, "m": 1, "grid": {"n": 8, "L": 4}, "p": [4]}]})")});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("clipping"), std::string::npos);
}

TEST(Config, BundledConfigParses) {
  const auto cfg = load_config(SCHATTEN_DEFAULT_CONFIG);
  EXPECT_EQ(cfg.experiments.size(), 27u);
  EXPECT_FALSE(cfg.scaling.empty());
  EXPECT_FALSE(cfg.clipping.empty());
  EXPECT_FALSE(cfg.refinement.empty());
  // The resolved config round-trips through its own schema.
  const auto again = parse_config(to_json(cfg));
  EXPECT_EQ(to_json(again), to_json(cfg));
}

TEST(Config, NumberEncodesNonFinite) {
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(number(1.5), 1.5);
}

}  // namespace
}  // namespace schatten::cli
