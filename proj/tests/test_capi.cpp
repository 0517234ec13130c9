#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "rdtf/rdtf.h"

namespace fs = std::filesystem;

namespace {

rdtf_grid_params grid65() { return {2, 1.0, 65, 0.25}; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RDTF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(rdtf_version()).size() > 0);
  CHECK(std::string(rdtf_status_name(RDTF_CONFIG)) == "configuration error");
}

TEST_CASE("metric handles, curvature and distance") {
  rdtf_grid_params g = grid65();
  rdtf_metric* flat = nullptr;
  REQUIRE(rdtf_metric_flat(&g, &flat) == RDTF_OK);
  rdtf_cone_params cp;
  rdtf_cone_defaults(&cp);
  cp.bump_inner = 0.3;
  cp.bump_outer = 0.6;
  rdtf_metric* cone = nullptr;
  REQUIRE(rdtf_metric_cone(&g, &cp, &cone) == RDTF_OK);
  double d = 0.0;
  REQUIRE(rdtf_c0_distance(flat, cone, &d) == RDTF_OK);
  CHECK(d > 0.0);
  CHECK(d < 0.1);

  rdtf_scalar* R = nullptr;
  REQUIRE(rdtf_scalar_curvature(flat, &R) == RDTF_OK);
  size_t n = 0;
  const double* data = nullptr;
  rdtf_scalar_size(R, &n);
  rdtf_scalar_data(R, &data);
  CHECK(n == 65u * 65u);
  CHECK(data[n / 2] == 0.0);
  rdtf_scalar_free(R);

  double m[4];
  CHECK(rdtf_metric_get(flat, 0, m) == RDTF_OK);
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 0.0);
  CHECK(rdtf_metric_get(flat, n, m) == RDTF_INVALID_ARGUMENT);

  const std::string path = (fs::temp_directory_path() / "rdtf_capi_metric.bin").string();
  REQUIRE(rdtf_metric_save(cone, path.c_str()) == RDTF_OK);
  rdtf_metric* back = nullptr;
  REQUIRE(rdtf_metric_load(path.c_str(), &back) == RDTF_OK);
  CHECK(rdtf_c0_distance(cone, back, &d) == RDTF_OK);
  CHECK(d == 0.0);
  fs::remove(path);
  rdtf_metric_free(back);
  rdtf_metric_free(cone);
  rdtf_metric_free(flat);
}

TEST_CASE("errors map to status codes with a message") {
  rdtf_grid_params bad{2, 1.0, 65, 0.01};
  rdtf_metric* g = nullptr;
  CHECK(rdtf_metric_flat(&bad, &g) == RDTF_INVALID_ARGUMENT);
  CHECK(std::string(rdtf_last_error()).find("collar") != std::string::npos);
  CHECK(rdtf_metric_flat(nullptr, &g) == RDTF_INVALID_ARGUMENT);
  CHECK(rdtf_metric_load("/nonexistent/file.bin", &g) == RDTF_IO);
  rdtf_grid_params ok = grid65();
  rdtf_cone_params cp;
  rdtf_cone_defaults(&cp);
  cp.sigma = 0.3;
  CHECK(rdtf_metric_cone(&ok, &cp, &g) == RDTF_INVALID_ARGUMENT);
}

TEST_CASE("flow through the C API") {
  rdtf_grid_params g = grid65();
  rdtf_cone_params cp;
  rdtf_cone_defaults(&cp);
  cp.bump_inner = 0.3;
  cp.bump_outer = 0.6;
  rdtf_metric* cone = nullptr;
  REQUIRE(rdtf_metric_cone(&g, &cp, &cone) == RDTF_OK);
  rdtf_trajectory* tr = nullptr;
  REQUIRE(rdtf_flow_run(cone, 1e-3, 0.1, 4, 2, &tr) == RDTF_OK);
  size_t n = 0;
  rdtf_trajectory_size(tr, &n);
  CHECK(n == 4);
  double t = 0.0;
  rdtf_trajectory_time(tr, n - 1, &t);
  CHECK(t == doctest::Approx(1e-3));
  rdtf_metric* last = nullptr;
  REQUIRE(rdtf_trajectory_metric(tr, n - 1, &last) == RDTF_OK);
  rdtf_metric_free(last);
  CHECK(rdtf_flow_run(cone, 1e-3, 0.5, 4, 2, &tr) != RDTF_OK);  // sigma above the explicit ceiling
  rdtf_trajectory_free(tr);
  rdtf_metric_free(cone);
}

TEST_CASE("list_experiments reports its size") {
  size_t needed = 0;
  REQUIRE(rdtf_list_experiments(nullptr, 0, &needed) == RDTF_OK);
  std::string buf(needed, '\0');
  REQUIRE(rdtf_list_experiments(buf.data(), buf.size(), nullptr) == RDTF_OK);
  CHECK(buf.find("davies_check → Eq. (hkd)") != std::string::npos);
  char small[8];
  rdtf_list_experiments(small, sizeof small, nullptr);
  CHECK(std::string(small).size() == 7);
}

TEST_CASE("CLI exit codes") {
  const fs::path root = fs::temp_directory_path() / "rdtf_cli_test";
  fs::remove_all(root);
  const fs::path good = write_config("rdtf_cli_good.json", R"({
    "grid": {"dim": 2, "half_width": 1.0, "points": 65, "collar_width": 0.25},
    "flow": {"t_end": 1e-2, "snapshots": 20, "per_octave": 2},
    "experiments": [{"name": "beta_weak_estimate", "params": {"beta": 0.25}}]})");
  const fs::path failing = write_config("rdtf_cli_fail.json", R"({
    "grid": {"dim": 2, "half_width": 1.0, "points": 65, "collar_width": 0.25},
    "metric": {"generator": "cone", "params": {"bump_inner": 0.3, "bump_outer": 0.6}},
    "flow": {"t_end": 1e-2, "snapshots": 20, "per_octave": 2},
    "experiments": [{"name": "decay_fits", "params": {"t_lo": 1e-4, "t_hi": 1e-2, "tolerance": 0.01}}]})");
  const fs::path bad = write_config("rdtf_cli_bad.json", R"({
    "grid": {"dim": 2, "half_width": 1.0, "points": 65, "collar_width": 0.25},
    "experiments": [{"name": "beta_weak_estimate", "params": {"beta": 0.6}}]})");
  CHECK(run_cli("list") == 0);
  CHECK(run_cli("validate " + good.string()) == 0);
  CHECK(run_cli("validate " + bad.string()) == 2);
  CHECK(run_cli("run " + bad.string()) == 2);
  CHECK(run_cli("run " + good.string() + " --output-root " + root.string()) == 0);
  CHECK(fs::exists(root / "rdtf_out" / "manifest.json"));
  CHECK(run_cli("run " + failing.string() + " --output-root " + root.string()) == 1);
  CHECK(run_cli("bogus") == 2);
  fs::remove_all(root);
  for (const auto& p : {good, failing, bad}) fs::remove(p);
}
