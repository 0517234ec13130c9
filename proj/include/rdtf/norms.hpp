#pragma once

#include <vector>

#include "rdtf/grid.hpp"
#include "rdtf/trajectory.hpp"

namespace rdtf {

enum class NormKind { C0, Lp, W1pWeighted, XNorm };

struct NormResult {
  NormKind kind = NormKind::C0;
  double value = 0.0;
  double p = 0.0;
  double tau = 0.0;
};

/// max over nodes and entries of |g_ij - h_ij|.
NormResult c0_distance(const Sym2Field& g, const Sym2Field& h);
/// (∫ |f|^p dx)^{1/p}.
NormResult lp_norm(const ScalarField& f, double p);

/// Weighted W^{1,p}_{-τ} norm of g - δ with weight ⟨x⟩ = (1+|x|²)^{1/2}:
///   ( ∫ (|g-δ| ⟨x⟩^τ)^p ⟨x⟩^{-n} + ∫ (|∂g| ⟨x⟩^{τ+1})^p ⟨x⟩^{-n} )^{1/p}.
/// Requires p > n.
NormResult weighted_w1p_norm(const MetricField& g, double p, double tau);
/// Same quadrature from precomputed pointwise magnitudes |g-δ| and |∂g|.
NormResult weighted_w1p_norm(const ScalarField& deviation, const ScalarField& grad, double p, double tau);

/// Radius ladder h, 2h, 4h, ... up to L.
std::vector<double> dyadic_radii(const GridSpec& grid);

struct XNormParts {
  double sup_linf = 0.0;
  double energy_term = 0.0;     // sup r^{-n/2} ||∂h||_{L²(B(x,r)×(0,r²))}
  double integral_term = 0.0;   // sup r^{2/(n+4)} ||∂h||_{L^{n+4}(B(x,r)×(r²/2,r²))}
  double radius = 0.0;          // radius attaining the (x, r) supremum
};

/// Parabolic X-norm of g(t) - δ over the stored slices (plus the t = 0
/// datum). Suprema over (x, r) run over grid nodes and dyadic_radii().
NormResult x_norm(const FlowTrajectory& traj, XNormParts* parts = nullptr);

}  // namespace rdtf
