#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rdtf/curvature.hpp"
#include "rdtf/field_ops.hpp"

using namespace rdtf;

namespace {

double conformal_error(int N) {
  const GridSpec g = GridSpec::make(2, 2.5, N, 0.3125);
  MetricField m(g);
  for (std::size_t n = 0; n < m.size(); ++n) {
    const Vec x = g.position(n);
    m[n][0][0] = m[n][1][1] = std::exp(0.2 * std::exp(-(x[0] * x[0] + x[1] * x[1])));
  }
  const ScalarField R = scalar_curvature(m);
  double e = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) {
    const Vec x = g.position(n);
    const double r2 = x[0] * x[0] + x[1] * x[1], f = 0.1 * std::exp(-r2);
    e = std::max(e, std::abs(R[n] + 2.0 * std::exp(-2.0 * f) * f * (4.0 * r2 - 4.0)));
  }
  return e;
}

}  // namespace

TEST_CASE("flat metric has zero curvature") {
  const GridSpec g = GridSpec::make(3, 1.0, 17, 0.5);
  const CurvatureBundle c = curvature(MetricField::flat(g));
  CHECK(sup_abs(c.scalar) == 0.0);
  CHECK(sup_abs(c.riem_norm) == 0.0);
}

TEST_CASE("conformal metric matches the closed form at second order") {
  const double e1 = conformal_error(65), e2 = conformal_error(129);
  CHECK(std::log2(e1 / e2) > 1.9);
}

TEST_CASE("linear coordinate change has zero curvature") {
  // A constant metric is flat in any coordinates.
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  MetricField m(g);
  for (std::size_t n = 0; n < m.size(); ++n) {
    m[n][0][0] = 2.0;
    m[n][0][1] = m[n][1][0] = 0.3;
    m[n][1][1] = 1.5;
  }
  CHECK(sup_abs(scalar_curvature(m)) < 1e-12);
}

TEST_CASE("round sphere patch in stereographic coordinates has R = 2") {
  const GridSpec g = GridSpec::make(2, 1.0, 129, 0.25);
  MetricField m(g);
  for (std::size_t n = 0; n < m.size(); ++n) {
    const Vec x = g.position(n);
    const double c = 4.0 / std::pow(1.0 + x[0] * x[0] + x[1] * x[1], 2);
    m[n][0][0] = m[n][1][1] = c;
  }
  const ScalarField R = scalar_curvature(m);
  CHECK(R[g.nearest_node({0.3, -0.2, 0.0})] == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("Laplace-Beltrami on a flat metric is the Euclidean Laplacian") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  const ScalarField f = sample(g, [](const Vec& x) { return x[0] * x[0] + 3.0 * x[1] * x[1]; });
  const ScalarField L = laplace_beltrami(MetricField::flat(g), f);
  CHECK(L[g.nearest_node({})] == doctest::Approx(8.0));
}

TEST_CASE("curvature rejects a degenerate metric") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  MetricField m(g);
  m[g.nearest_node({})][0][0] = 0.0;
  CHECK_THROWS_AS(scalar_curvature(m), Error);
}
