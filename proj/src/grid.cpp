#include "rdtf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdtf/linalg.hpp"

namespace rdtf {

namespace {
constexpr double kEigenFloor = 1e-10;
}

GridSpec GridSpec::make(int dim, double half_width, int points, double collar_width) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "grid dimension must be 2 or 3");
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid half_width must be positive");
  if (points < 16) throw Error(ErrorCode::InvalidArgument, "grid needs at least 16 points per axis");
  GridSpec g{dim, half_width, points, collar_width};
  if (collar_width < 4.0 * g.spacing() * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "collar_width " << collar_width << " is below 4h = " << 4.0 * g.spacing();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  if (collar_width >= half_width) throw Error(ErrorCode::InvalidArgument, "collar covers the whole box");
  return g;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t GridSpec::node_count() const {
  std::size_t c = 1;
  for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(points);
  return c;
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(points);
  return s;
}

std::array<int, kMaxDim> GridSpec::unflatten(std::size_t node) const {
  std::array<int, kMaxDim> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(node % points);
    node /= points;
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<int, kMaxDim>& idx) const {
  std::size_t n = 0;
  for (int a = 0; a < dim; ++a) n = n * points + idx[a];
  return n;
}

Vec GridSpec::position(std::size_t node) const {
  const auto idx = unflatten(node);
  Vec x{0, 0, 0};
  for (int a = 0; a < dim; ++a) x[a] = coord(idx[a]);
  return x;
}

std::size_t GridSpec::nearest_node(const Vec& x) const {
  std::array<int, kMaxDim> idx{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const long i = std::lround((x[a] + half_width) / spacing());
    idx[a] = static_cast<int>(std::clamp<long>(i, 0, points - 1));
  }
  return flatten(idx);
}

bool GridSpec::in_collar(std::size_t node) const {
  const auto idx = unflatten(node);
  const double edge = half_width - collar_width + 1e-12 * half_width;
  for (int a = 0; a < dim; ++a)
    if (std::abs(coord(idx[a])) > edge) return true;
  return false;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a != b) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

Mat identity_matrix(int dim) {
  Mat m{};
  for (int i = 0; i < dim; ++i) m[i][i] = 1.0;
  return m;
}

void MetricField::validate() const {
  const int n = grid().dim;
  for (std::size_t node = 0; node < size(); ++node) {
    const Mat& g = (*this)[node];
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (g[i][j] != g[j][i]) {
          std::ostringstream os;
          os << "metric not symmetric at node " << node;
          throw Error(ErrorCode::InvalidArgument, os.str());
        }
    const auto [lo, hi] = eigen_range(g, n);
    if (!(lo > kEigenFloor)) {
      std::ostringstream os;
      os << "metric not positive definite at node " << node << " (min eigenvalue " << lo << ")";
      throw Error(ErrorCode::NotPositiveDefinite, os.str());
    }
  }
}

double MetricField::collar_deviation() const {
  const int n = grid().dim;
  double worst = 0.0;
  for (std::size_t node = 0; node < size(); ++node) {
    if (!grid().in_collar(node)) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, std::abs((*this)[node][i][j] - (i == j ? 1.0 : 0.0)));
  }
  return worst;
}

}  // namespace rdtf
