#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "rdtf/flow.hpp"
#include "rdtf/norms.hpp"
#include "rdtf/weak_scalar.hpp"

using namespace rdtf;

TEST_CASE("flat metric is a fixed point") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  const MetricField flat = MetricField::flat(g);
  MetricField m = flat;
  for (int k = 0; k < 200; ++k) m = rdtf_step(m, stable_time_step(m, 0.1));
  CHECK(c0_distance(m, flat).value <= 1e-14);
}

TEST_CASE("time step obeys the explicit ceiling") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  const MetricField m = MetricField::flat(g);
  CHECK(stability_limit(2) == doctest::Approx(0.25));
  CHECK(stable_time_step(m, 0.1) == doctest::Approx(0.1 * g.spacing() * g.spacing()));
  CHECK_THROWS_AS(rdtf_step(m, g.spacing() * g.spacing()), Error);
}

TEST_CASE("geometric snapshots are ascending and dyadic") {
  const auto t = geometric_snapshots(1.0, 5, 2);
  REQUIRE(t.size() == 5);
  CHECK(t.back() == 1.0);
  CHECK(t[2] == doctest::Approx(0.5));
  CHECK(t[0] == doctest::Approx(0.25));
}

TEST_CASE("a cone perturbation decays and keeps the collar flat") {
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  ConeParams cp;
  cp.bump_inner = 0.3;
  cp.bump_outer = 0.6;
  const MetricField g0 = make_w1p_cone(g, cp);
  const FlowTrajectory tr = run_flow(g0, 1e-3, geometric_snapshots(1e-3, 6, 2));
  REQUIRE(tr.size() == 6);
  CHECK(tr.slices().back().metric.collar_deviation() == 0.0);
  CHECK(tr.slices().back().diagnostics.sup_gradient < tr.slices().front().diagnostics.sup_gradient);
  CHECK(tr.find(tr.times()[3]) == 3);
  CHECK(tr.find(0.123) == -1);
}

TEST_CASE("run_flow enforces its preconditions") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  MetricField far(g);
  far[g.nearest_node({})][0][0] = 2.5;  // ||g - δ|| ≥ 1
  CHECK_THROWS_AS(run_flow(far, 1e-3, {1e-3}), Error);
  MetricField collar(g);
  collar[0][0][0] = 1.1;
  CHECK_THROWS_AS(run_flow(collar, 1e-3, {1e-3}), Error);
}

TEST_CASE("trajectory checkpoints round-trip") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  ConeParams cp;
  cp.bump_inner = 0.3;
  cp.bump_outer = 0.6;
  const FlowTrajectory tr = run_flow(make_w1p_cone(g, cp), 1e-3, geometric_snapshots(1e-3, 3, 1));
  const auto dir = (std::filesystem::temp_directory_path() / "rdtf_traj_roundtrip").string();
  std::filesystem::remove_all(dir);
  save_trajectory(tr, dir);
  const FlowTrajectory back = load_trajectory(dir);
  REQUIRE(back.size() == tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(back[i].t == tr[i].t);
    CHECK(c0_distance(back[i].metric, tr[i].metric).value == 0.0);
  }
  std::filesystem::remove_all(dir);
}
