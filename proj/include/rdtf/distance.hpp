#pragma once

#include "rdtf/grid.hpp"

namespace rdtf {

struct DistanceField {
  std::size_t base = 0;
  double t = 0.0;
  ScalarField d;
};

/// Shortest-path distance to x0 on the grid graph whose edges join every
/// node to its 3^n - 1 neighbours. An edge e has length √(eᵀ ḡ e) with ḡ the
/// average of the endpoint metrics.
DistanceField geodesic_distance(const MetricField& g, std::size_t x0);

}  // namespace rdtf
