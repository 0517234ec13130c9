#pragma once

#include "rdtf/field_ops.hpp"
#include "rdtf/grid.hpp"

namespace rdtf {

/// Γ^k_ij per node, indexed [k][i][j].
using ConnectionField = Field<Mat3>;

/// Everything the flow and the curvature operators need at one node, built
/// from the metric jet against the Euclidean background.
struct LocalGeometry {
  int dim = 2;
  Mat g{}, ginv{};
  double volume_density = 1.0;  // √det g
  Mat3 gamma{};                 // Γ^k_ij
  std::array<Mat3, kMaxDim> dgamma{};  // ∂_m Γ^k_ij, indexed [m][k][i][j]
  Vec deturck{};                // X^k = -g^{ij} Γ^k_ij
  Mat ddeturck{};               // ∂_m X^k, indexed [m][k]
  Mat ricci{};
  double scalar = 0.0;
  double ricci_norm_sq = 0.0;   // |Ric|²_g
};

/// Throws NotPositiveDefinite (with the node index) if the smallest
/// eigenvalue of the metric falls below 1e-10.
LocalGeometry local_geometry(const MetricJet& jet, int dim, std::size_t node, bool with_curvature);
/// |Rm|_g from the connection and its derivatives.
double riemann_norm(const LocalGeometry& geo);
/// -2 Ric - L_X g with (L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k.
Mat deturck_velocity(const LocalGeometry& geo, const MetricJet& jet);

ConnectionField christoffel(const MetricField& g);
VectorField deturck_vector(const MetricField& g);

struct CurvatureBundle {
  Sym2Field ricci;
  ScalarField scalar;
  ScalarField riem_norm;
  ScalarField ricci_norm_sq;
};

CurvatureBundle curvature(const MetricField& g);
ScalarField scalar_curvature(const MetricField& g);

/// Δ_g f = g^{ij} ∂_i∂_j f - g^{ij} Γ^k_ij ∂_k f, which equals
/// (1/√det g) ∂_i(√det g g^{ij} ∂_j f) for smooth data.
ScalarField laplace_beltrami(const MetricField& g, const ScalarField& f);

/// √det g per node.
ScalarField volume_density(const MetricField& g);

}  // namespace rdtf
