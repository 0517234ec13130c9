#include "rdtf/distance.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace rdtf {

DistanceField geodesic_distance(const MetricField& g, std::size_t x0) {
  const GridSpec& grid = g.grid();
  if (x0 >= grid.node_count()) throw Error(ErrorCode::InvalidArgument, "base node out of range");
  g.validate();
  const int n = grid.dim;
  const double h = grid.spacing();

  std::vector<std::array<int, kMaxDim>> moves;
  const int span = n == 2 ? 9 : 27;
  for (int c = 0; c < span; ++c) {
    std::array<int, kMaxDim> m{0, 0, 0};
    int r = c;
    bool zero = true;
    for (int a = 0; a < n; ++a) {
      m[a] = r % 3 - 1;
      r /= 3;
      zero = zero && m[a] == 0;
    }
    if (!zero) moves.push_back(m);
  }

  DistanceField out{x0, g.time_tag.value_or(0.0), ScalarField(grid, std::numeric_limits<double>::infinity())};
  auto& d = out.d;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  d[x0] = 0.0;
  heap.push({0.0, x0});
  std::vector<char> done(grid.node_count(), 0);
  while (!heap.empty()) {
    const auto [dist, node] = heap.top();
    heap.pop();
    if (done[node]) continue;
    done[node] = 1;
    const auto idx = grid.unflatten(node);
    for (const auto& m : moves) {
      std::array<int, kMaxDim> j = idx;
      bool inside = true;
      for (int a = 0; a < n; ++a) {
        j[a] += m[a];
        inside = inside && j[a] >= 0 && j[a] < grid.points;
      }
      if (!inside) continue;
      const std::size_t nb = grid.flatten(j);
      if (done[nb]) continue;
      double len2 = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) len2 += 0.5 * (g[node][a][b] + g[nb][a][b]) * m[a] * m[b];
      const double cand = dist + h * std::sqrt(len2);
      if (cand < d[nb]) {
        d[nb] = cand;
        heap.push({cand, nb});
      }
    }
  }
  return out;
}

}  // namespace rdtf
