#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rdtf/distance.hpp"

using namespace rdtf;

TEST_CASE("flat distance along axes and diagonals is exact") {
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  const std::size_t o = g.nearest_node({});
  const DistanceField d = geodesic_distance(MetricField::flat(g), o);
  CHECK(d.d[o] == 0.0);
  CHECK(d.d[g.nearest_node({0.5, 0.0, 0.0})] == doctest::Approx(0.5));
  CHECK(d.d[g.nearest_node({0.5, 0.5, 0.0})] == doctest::Approx(0.5 * std::sqrt(2.0)));
}

TEST_CASE("octagonal stencil stays within 8 percent of Euclidean") {
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  const std::size_t o = g.nearest_node({});
  const DistanceField d = geodesic_distance(MetricField::flat(g), o);
  const std::size_t p = g.nearest_node({0.5, 0.25, 0.0});
  const double exact = std::hypot(0.5, 0.25);
  CHECK(d.d[p] >= exact * (1.0 - 1e-12));
  CHECK(d.d[p] <= exact * 1.08);
}

TEST_CASE("homothety scales distances by the square root of the factor") {
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  MetricField m(g);
  for (std::size_t n = 0; n < m.size(); ++n) m[n][0][0] = m[n][1][1] = 4.0;
  const std::size_t o = g.nearest_node({});
  const DistanceField a = geodesic_distance(MetricField::flat(g), o);
  const DistanceField b = geodesic_distance(m, o);
  for (std::size_t n : {0ul, 777ul, 2000ul}) CHECK(b.d[n] == doctest::Approx(2.0 * a.d[n]));
}

TEST_CASE("distance rejects an out-of-range base point") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  CHECK_THROWS_AS(geodesic_distance(MetricField::flat(g), g.node_count()), Error);
}
