#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rdtf/runner.hpp"

using namespace rdtf;
namespace fs = std::filesystem;

namespace {

const char* kFlatConfig = R"({
  "grid": {"dim": 2, "half_width": 2.5, "points": 65, "collar_width": 0.3125},
  "metric": {"generator": "flat"},
  "flow": {"t_end": 1e-2, "snapshots": 20, "per_octave": 2},
  "experiments": [
    {"name": "decay_fits", "params": {"t_lo": 1e-4, "t_hi": 1e-2}},
    {"name": "w1p_estimates_check", "params": {"p": 4, "A": 1, "t_lo": 1e-4, "t_hi": 1e-2}},
    {"name": "beta_weak_estimate", "params": {"beta": 0.25}},
    {"name": "lower_bound_decay_fit", "params": {"beta": 0.25, "gamma": 3}},
    {"name": "theorem45_pipeline", "params": {"beta": 0.25, "gamma": 3}}
  ],
  "seed": 3
})";

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return "";
}

std::string with_experiment(const std::string& experiment) {
  return R"({"grid": {"dim": 2, "half_width": 1.0, "points": 65, "collar_width": 0.25},
             "metric": {"generator": "flat"}, "experiments": [)" + experiment + "]}";
}

}  // namespace

TEST_CASE("config validation names the offending field") {
  CHECK(config_error("{not json").find("invalid JSON") != std::string::npos);
  CHECK(config_error("{}").find("grid") != std::string::npos);
  CHECK(config_error(with_experiment(R"({"name": "nope"})")).find("unknown experiment") != std::string::npos);
  const std::string beta = config_error(with_experiment(R"({"name": "beta_weak_estimate", "params": {"beta": 0.6}})"));
  CHECK(beta.find("experiments[0].params.beta") != std::string::npos);
  CHECK(beta.find("Definition 2.3") != std::string::npos);
  CHECK(config_error(with_experiment(R"({"name": "lower_bound_decay_fit", "params": {"beta": 0.25, "gamma": 1.5}})"))
            .find("gamma") != std::string::npos);
  CHECK(config_error(with_experiment(R"({"name": "decay_fits", "params": {"t_lo": 1e-4, "t_hi": 1e-3}})"))
            .find("t_lo/t_hi") != std::string::npos);
  CHECK(config_error(with_experiment(R"({"name": "w1p_estimates_check", "params": {"p": 1.5, "A": 1, "t_lo": 1e-5, "t_hi": 1e-3}})"))
            .find(".p") != std::string::npos);
}

TEST_CASE("metric generators are validated before any run") {
  const std::string far = R"({"grid": {"dim": 2, "half_width": 1.0, "points": 65, "collar_width": 0.25},
      "metric": {"generator": "cone", "params": {"amplitude": 0.9}}, "experiments": []})";
  CHECK(config_error(far).find("metric.params") != std::string::npos);
  const std::string gen = R"({"grid": {"dim": 2, "half_width": 1.0, "points": 65, "collar_width": 0.25},
      "metric": {"generator": "sphere"}, "experiments": []})";
  CHECK(config_error(gen).find("metric.generator") != std::string::npos);
  const std::string cfl = R"({"grid": {"dim": 2, "half_width": 1.0, "points": 65, "collar_width": 0.25},
      "flow": {"sigma_cfl": 0.5}, "experiments": []})";
  CHECK(config_error(cfl).find("flow.sigma_cfl") != std::string::npos);
}

TEST_CASE("list_experiments carries the anchors") {
  const std::string t = list_experiments();
  CHECK(t.find("lower_bound_decay_fit → Theorem 3.1") != std::string::npos);
  CHECK(t.find("theorem45_pipeline → Theorem 4.5") != std::string::npos);
  CHECK(t.find("davies_check → Eq. (hkd)") != std::string::npos);
}

TEST_CASE("content hash is FNV-1a") {
  CHECK(content_hash("") == "cbf29ce484222325");
  CHECK(content_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("flat run passes, writes every listed file and is deterministic") {
  const fs::path root = fs::temp_directory_path() / "rdtf_runner_test";
  fs::remove_all(root);
  std::string csv[2];
  for (int k = 0; k < 2; ++k) {
    ExperimentConfig cfg = parse_config(kFlatConfig);
    cfg.output_dir = "run" + std::to_string(k);
    const RunManifest m = run_experiments(cfg, kFlatConfig, root.string());
    CHECK(m.passed);
    CHECK(m.config_hash == content_hash(kFlatConfig));
    for (const auto& e : m.experiments) CHECK_MESSAGE(e.status == "pass", e.name << ": " << e.message);
    for (const auto& f : m.files) CHECK(fs::exists(f));
    const fs::path dir = root / cfg.output_dir;
    csv[k] = slurp(dir / "fits.csv") + slurp(dir / "checks.csv");
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["experiments"].size() == 5);
    CHECK(manifest["passed"] == true);
    // Energy rows of the pipeline are identically zero.
    std::istringstream summary(slurp(dir / "04_theorem45_pipeline.txt"));
    std::string line;
    bool in_table = false;
    int rows = 0;
    while (std::getline(summary, line)) {
      if (line == "t,E,f_sup,annulus_mass") {
        in_table = true;
        continue;
      }
      if (!in_table) continue;
      const auto a = line.find(','), b = line.find(',', a + 1);
      CHECK(std::stod(line.substr(a + 1, b - a - 1)) == 0.0);
      ++rows;
    }
    CHECK(rows > 0);
  }
  CHECK(csv[0] == csv[1]);
  fs::remove_all(root);
}

TEST_CASE("output root comes from the environment when not given") {
  const fs::path root = fs::temp_directory_path() / "rdtf_runner_env";
  fs::remove_all(root);
  setenv("RDTF_OUTPUT_ROOT", root.c_str(), 1);
  const std::string text = with_experiment(R"({"name": "beta_weak_estimate", "params": {"beta": 0.25}})");
  ExperimentConfig cfg = parse_config(text);
  cfg.t_end = 1e-2;
  cfg.snapshots = 20;
  run_experiments(cfg, text);
  unsetenv("RDTF_OUTPUT_ROOT");
  CHECK(fs::exists(root / "rdtf_out" / "manifest.json"));
  fs::remove_all(root);
}
