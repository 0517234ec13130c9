#include "rdtf/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "rdtf/linalg.hpp"

namespace rdtf {

AxisStencil first_derivative_stencil(int i, int points, double h) {
  AxisStencil s;
  s.count = 3;
  const double inv = 1.0 / (2.0 * h);
  if (i == 0) {
    s.offset[0] = 0, s.offset[1] = 1, s.offset[2] = 2;
    s.weight[0] = -3.0 * inv, s.weight[1] = 4.0 * inv, s.weight[2] = -1.0 * inv;
  } else if (i == points - 1) {
    s.offset[0] = 0, s.offset[1] = -1, s.offset[2] = -2;
    s.weight[0] = 3.0 * inv, s.weight[1] = -4.0 * inv, s.weight[2] = 1.0 * inv;
  } else {
    s.count = 2;
    s.offset[0] = -1, s.offset[1] = 1;
    s.weight[0] = -inv, s.weight[1] = inv;
  }
  return s;
}

AxisStencil second_derivative_stencil(int i, int points, double h) {
  AxisStencil s;
  const double inv = 1.0 / (h * h);
  if (i == 0 || i == points - 1) {
    const int dir = i == 0 ? 1 : -1;
    s.count = 4;
    for (int p = 0; p < 4; ++p) s.offset[p] = dir * p;
    s.weight[0] = 2.0 * inv, s.weight[1] = -5.0 * inv, s.weight[2] = 4.0 * inv, s.weight[3] = -1.0 * inv;
  } else {
    s.count = 3;
    s.offset[0] = -1, s.offset[1] = 0, s.offset[2] = 1;
    s.weight[0] = inv, s.weight[1] = -2.0 * inv, s.weight[2] = inv;
  }
  return s;
}

namespace {

struct NodeStencils {
  AxisStencil first[kMaxDim];
  AxisStencil second[kMaxDim];
  std::ptrdiff_t stride[kMaxDim];
};

NodeStencils stencils_at(const GridSpec& grid, std::size_t node) {
  NodeStencils s;
  const auto idx = grid.unflatten(node);
  const double h = grid.spacing();
  for (int a = 0; a < grid.dim; ++a) {
    s.first[a] = first_derivative_stencil(idx[a], grid.points, h);
    s.second[a] = second_derivative_stencil(idx[a], grid.points, h);
    s.stride[a] = static_cast<std::ptrdiff_t>(grid.stride(a));
  }
  return s;
}

template <class Get>
double apply1(const AxisStencil& st, std::ptrdiff_t stride, std::size_t node, Get&& get) {
  double acc = 0.0;
  for (int p = 0; p < st.count; ++p) acc += st.weight[p] * get(node + st.offset[p] * stride);
  return acc;
}

template <class Get>
double apply_mixed(const NodeStencils& s, int a, int b, std::size_t node, Get&& get) {
  double acc = 0.0;
  const AxisStencil& sa = s.first[a];
  const AxisStencil& sb = s.first[b];
  for (int p = 0; p < sa.count; ++p)
    for (int q = 0; q < sb.count; ++q)
      acc += sa.weight[p] * sb.weight[q] *
             get(node + sa.offset[p] * s.stride[a] + sb.offset[q] * s.stride[b]);
  return acc;
}

template <class Get>
void jet_component(const NodeStencils& s, int n, std::size_t node, bool with_second, Get&& get,
                   double* d1, double d2[kMaxDim][kMaxDim]) {
  for (int a = 0; a < n; ++a) d1[a] = apply1(s.first[a], s.stride[a], node, get);
  if (!with_second) return;
  for (int a = 0; a < n; ++a) {
    d2[a][a] = apply1(s.second[a], s.stride[a], node, get);
    for (int b = a + 1; b < n; ++b) d2[a][b] = d2[b][a] = apply_mixed(s, a, b, node, get);
  }
}

}  // namespace

MetricJet metric_jet(const Sym2Field& g, std::size_t node, bool with_second) {
  const int n = g.grid().dim;
  const NodeStencils s = stencils_at(g.grid(), node);
  MetricJet jet;
  jet.g = g[node];
  const auto& vals = g.values();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double d1[kMaxDim] = {0, 0, 0};
      double d2[kMaxDim][kMaxDim] = {};
      jet_component(s, n, node, with_second, [&](std::size_t m) { return vals[m][i][j]; }, d1, d2);
      for (int a = 0; a < n; ++a) {
        jet.d1[a][i][j] = jet.d1[a][j][i] = d1[a];
        if (with_second)
          for (int b = 0; b < n; ++b) jet.d2[a][b][i][j] = jet.d2[a][b][j][i] = d2[a][b];
      }
    }
  return jet;
}

ScalarJet scalar_jet(const ScalarField& f, std::size_t node) {
  const int n = f.grid().dim;
  const NodeStencils s = stencils_at(f.grid(), node);
  ScalarJet jet;
  jet.f = f[node];
  double d1[kMaxDim] = {0, 0, 0};
  double d2[kMaxDim][kMaxDim] = {};
  const auto& vals = f.values();
  jet_component(s, n, node, true, [&](std::size_t m) { return vals[m]; }, d1, d2);
  for (int a = 0; a < n; ++a) {
    jet.d1[a] = d1[a];
    for (int b = 0; b < n; ++b) jet.d2[a][b] = d2[a][b];
  }
  return jet;
}

VectorField gradient(const ScalarField& f) {
  VectorField out(f.grid());
  const int n = f.grid().dim;
  const auto& vals = f.values();
  for (std::size_t node = 0; node < f.size(); ++node) {
    const NodeStencils s = stencils_at(f.grid(), node);
    for (int a = 0; a < n; ++a)
      out[node][a] = apply1(s.first[a], s.stride[a], node, [&](std::size_t m) { return vals[m]; });
  }
  return out;
}

Rank3Field gradient(const Sym2Field& g) {
  Rank3Field out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node) out[node] = metric_jet(g, node, false).d1;
  return out;
}

Sym2Field hessian(const ScalarField& f) {
  Sym2Field out(f.grid());
  for (std::size_t node = 0; node < f.size(); ++node) out[node] = scalar_jet(f, node).d2;
  return out;
}

ScalarField deviation_magnitude(const Sym2Field& g) {
  ScalarField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node)
    out[node] = deviation_from_identity(g[node], g.grid().dim);
  return out;
}

ScalarField gradient_magnitude(const Sym2Field& g) {
  const int n = g.grid().dim;
  ScalarField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node) {
    const MetricJet jet = metric_jet(g, node, false);
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += jet.d1[k][i][j] * jet.d1[k][i][j];
    out[node] = std::sqrt(s);
  }
  return out;
}

ScalarField hessian_magnitude(const Sym2Field& g) {
  const int n = g.grid().dim;
  ScalarField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node) {
    const MetricJet jet = metric_jet(g, node, true);
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += jet.d2[a][b][i][j] * jet.d2[a][b][i][j];
    out[node] = std::sqrt(s);
  }
  return out;
}

double sup_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

double integrate(const ScalarField& f, const ScalarField& weight) {
  require_same_grid(f.grid(), weight.grid());
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) s += f[n] * weight[n];
  return s * f.grid().cell_volume();
}

namespace {

void write_header(std::ofstream& os, const GridSpec& g) {
  const std::int32_t dim = g.dim, pts = g.points;
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  os.write(reinterpret_cast<const char*>(&pts), sizeof pts);
  os.write(reinterpret_cast<const char*>(&g.half_width), sizeof(double));
  os.write(reinterpret_cast<const char*>(&g.collar_width), sizeof(double));
}

GridSpec read_header(std::ifstream& is, const std::string& path) {
  std::int32_t dim = 0, pts = 0;
  double L = 0, w = 0;
  is.read(reinterpret_cast<char*>(&dim), sizeof dim);
  is.read(reinterpret_cast<char*>(&pts), sizeof pts);
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  is.read(reinterpret_cast<char*>(&w), sizeof w);
  if (!is) throw Error(ErrorCode::Io, "truncated field header in " + path);
  return GridSpec::make(dim, L, pts, w);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  return is;
}

void write_coords(std::ostream& os, const GridSpec& g, std::size_t node) {
  const Vec x = g.position(node);
  for (int a = 0; a < g.dim; ++a) os << x[a] << ',';
}

}  // namespace

void write_binary(const std::string& path, const MetricField& g) {
  auto os = open_out(path);
  write_header(os, g.grid());
  const int n = g.grid().dim;
  for (std::size_t node = 0; node < g.size(); ++node)
    for (int i = 0; i < n; ++i) os.write(reinterpret_cast<const char*>(g[node][i].data()), n * sizeof(double));
  if (!os) throw Error(ErrorCode::Io, "write failed for " + path);
}

void write_binary(const std::string& path, const ScalarField& f) {
  auto os = open_out(path);
  write_header(os, f.grid());
  os.write(reinterpret_cast<const char*>(f.values().data()), f.size() * sizeof(double));
  if (!os) throw Error(ErrorCode::Io, "write failed for " + path);
}

MetricField read_metric_binary(const std::string& path) {
  auto is = open_in(path);
  MetricField g(read_header(is, path));
  const int n = g.grid().dim;
  for (std::size_t node = 0; node < g.size(); ++node)
    for (int i = 0; i < n; ++i) is.read(reinterpret_cast<char*>(g[node][i].data()), n * sizeof(double));
  if (!is) throw Error(ErrorCode::Io, "truncated metric payload in " + path);
  return g;
}

ScalarField read_scalar_binary(const std::string& path) {
  auto is = open_in(path);
  ScalarField f(read_header(is, path));
  is.read(reinterpret_cast<char*>(f.values().data()), f.size() * sizeof(double));
  if (!is) throw Error(ErrorCode::Io, "truncated scalar payload in " + path);
  return f;
}

void write_csv(std::ostream& os, const MetricField& g) {
  const int n = g.grid().dim;
  for (int a = 0; a < n; ++a) os << 'x' << a << ',';
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) os << 'g' << i << j << (i == n - 1 && j == n - 1 ? "\n" : ",");
  os << std::setprecision(17);
  for (std::size_t node = 0; node < g.size(); ++node) {
    write_coords(os, g.grid(), node);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) os << g[node][i][j] << (i == n - 1 && j == n - 1 ? "\n" : ",");
  }
}

void write_csv(std::ostream& os, const ScalarField& f) {
  const int n = f.grid().dim;
  for (int a = 0; a < n; ++a) os << 'x' << a << ',';
  os << "value\n" << std::setprecision(17);
  for (std::size_t node = 0; node < f.size(); ++node) {
    write_coords(os, f.grid(), node);
    os << f[node] << '\n';
  }
}

}  // namespace rdtf
