#pragma once

#include <iosfwd>
#include <string>

#include "rdtf/grid.hpp"

namespace rdtf {

/// Three- or four-point second-order finite-difference weights along one axis.
/// Centered in the interior, one-sided in the first/last layer.
struct AxisStencil {
  int count = 0;
  int offset[4] = {0, 0, 0, 0};
  double weight[4] = {0, 0, 0, 0};
};

AxisStencil first_derivative_stencil(int i, int points, double h);
AxisStencil second_derivative_stencil(int i, int points, double h);

/// Value, first and second partial derivatives of a metric at one node.
/// d1[k][i][j] = ∂_k g_ij, d2[a][b][i][j] = ∂_a ∂_b g_ij.
struct MetricJet {
  Mat g{};
  Mat3 d1{};
  std::array<Mat3, kMaxDim> d2{};
};

struct ScalarJet {
  double f = 0.0;
  Vec d1{};
  Mat d2{};
};

MetricJet metric_jet(const Sym2Field& g, std::size_t node, bool with_second = true);
ScalarJet scalar_jet(const ScalarField& f, std::size_t node);

VectorField gradient(const ScalarField& f);
Rank3Field gradient(const Sym2Field& g);
Sym2Field hessian(const ScalarField& f);

/// Pointwise Frobenius magnitudes, used by the diagnostics and norms.
ScalarField deviation_magnitude(const Sym2Field& g);
ScalarField gradient_magnitude(const Sym2Field& g);
ScalarField hessian_magnitude(const Sym2Field& g);

double sup_abs(const ScalarField& f);
/// ∫ f dx by nodal quadrature (each node owns a cell of volume h^n).
double integrate(const ScalarField& f);
/// ∫ f·w dx.
double integrate(const ScalarField& f, const ScalarField& weight);

ScalarField sample(const GridSpec& grid, const auto& fn) {
  ScalarField out(grid);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = fn(grid.position(n));
  return out;
}

// Flat binary layout: int32 dim, int32 N, float64 L, float64 w, then the
// node payload as float64 in row-major node order (n*n entries per metric
// node, one per scalar node).
void write_binary(const std::string& path, const MetricField& g);
void write_binary(const std::string& path, const ScalarField& f);
MetricField read_metric_binary(const std::string& path);
ScalarField read_scalar_binary(const std::string& path);
void write_csv(std::ostream& os, const MetricField& g);
void write_csv(std::ostream& os, const ScalarField& f);

}  // namespace rdtf
