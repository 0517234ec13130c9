#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "rdtf/field_ops.hpp"
#include "rdtf/grid.hpp"
#include "rdtf/norms.hpp"

using namespace rdtf;

TEST_CASE("grid construction validates its parameters") {
  CHECK_THROWS_AS(GridSpec::make(4, 1.0, 65, 0.25), Error);
  CHECK_THROWS_AS(GridSpec::make(2, -1.0, 65, 0.25), Error);
  CHECK_THROWS_AS(GridSpec::make(2, 1.0, 8, 0.5), Error);
  CHECK_THROWS_AS(GridSpec::make(2, 1.0, 65, 0.01), Error);  // collar thinner than 4h
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  CHECK(g.node_count() == 65u * 65u);
  CHECK(g.spacing() == doctest::Approx(1.0 / 32));
}

TEST_CASE("flatten and nearest node round-trip") {
  const GridSpec g = GridSpec::make(3, 1.0, 17, 0.5);
  for (std::size_t n : {0ul, 100ul, 4912ul - 1}) {
    CHECK(g.flatten(g.unflatten(n)) == n);
    CHECK(g.nearest_node(g.position(n)) == n);
  }
  CHECK(g.in_collar(0));
  CHECK_FALSE(g.in_collar(g.nearest_node({})));
}

TEST_CASE("finite differences are exact on quadratics") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  const ScalarField f = sample(g, [](const Vec& x) { return 3.0 * x[0] * x[0] - x[0] * x[1] + 2.0 * x[1]; });
  const VectorField df = gradient(f);
  const Sym2Field d2f = hessian(f);
  for (std::size_t n : {0ul, 500ul, g.node_count() - 1}) {
    const Vec x = g.position(n);
    CHECK(df[n][0] == doctest::Approx(6.0 * x[0] - x[1]).epsilon(1e-9));
    CHECK(df[n][1] == doctest::Approx(-x[0] + 2.0).epsilon(1e-9));
    CHECK(d2f[n][0][0] == doctest::Approx(6.0).epsilon(1e-8));
    CHECK(d2f[n][0][1] == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(d2f[n][1][1] == doctest::Approx(0.0).epsilon(1e-8));
  }
}

TEST_CASE("quadrature integrates a Gaussian") {
  const GridSpec g = GridSpec::make(2, 4.0, 129, 0.5);
  const ScalarField f = sample(g, [](const Vec& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); });
  CHECK(integrate(f) == doctest::Approx(M_PI).epsilon(1e-6));
}

TEST_CASE("C0 distance and Lp norm") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  MetricField a(g), b(g);
  b[10][0][1] = b[10][1][0] = 0.3;
  CHECK(c0_distance(a, b).value == doctest::Approx(0.3));
  const ScalarField one(g, 1.0);
  CHECK(lp_norm(one, 2.0).value == doctest::Approx(std::sqrt(g.cell_volume() * g.node_count())));
}

TEST_CASE("metric validation rejects non-positive metrics") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  MetricField m(g);
  CHECK_NOTHROW(m.validate());
  m[40][0][0] = -1.0;
  CHECK_THROWS_AS(m.validate(), Error);
  MetricField c(g);
  c[0][0][0] = 1.5;
  CHECK(c.collar_deviation() == doctest::Approx(0.5));
}

TEST_CASE("binary metric files round-trip") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  MetricField m(g);
  m[7][0][1] = m[7][1][0] = 0.125;
  const auto path = (std::filesystem::temp_directory_path() / "rdtf_field_roundtrip.bin").string();
  write_binary(path, m);
  const MetricField r = read_metric_binary(path);
  CHECK(r.grid() == g);
  CHECK(c0_distance(m, r).value == 0.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_metric_binary(path), Error);
}
