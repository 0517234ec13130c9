#pragma once

#include <vector>

#include "rdtf/grid.hpp"
#include "rdtf/trajectory.hpp"

namespace rdtf {

/// Time-stepper for the scalar equations living on a flow background.
///
/// Forward:   ∂_t w = Δ_{g(t)} w - ∇_X w  (= g^{ij} ∂_i∂_j w)
/// Conjugate: ∂_t φ = -Δ_{g(t)} φ + R φ - ∇_X φ, solved backwards in time.
///
/// The forward step is explicit Euler with a monotone (non-negative weight)
/// stencil; the conjugate step is its exact discrete adjoint with respect to
/// Σ w φ √det g h^n, so the pairing of a forward and a conjugate solution is
/// conserved to round-off. The collar is absorbing (w = φ = 0 there). The
/// metric between stored slices is interpolated linearly in time.
class ScalarPropagator {
 public:
  ScalarPropagator(const FlowTrajectory& traj, double sigma = 0.1);

  /// Evolve w from time s to each of `capture` (ascending, all ≥ s).
  std::vector<ScalarField> forward(const ScalarField& w_s, double s, const std::vector<double>& capture) const;
  ScalarField forward(const ScalarField& w_s, double s, double t) const;

  /// Evolve φ from time T back to each of `capture` (any order, all ≤ T).
  /// Results are returned in the order of `capture`.
  std::vector<ScalarField> backward(const ScalarField& phi_T, double T, const std::vector<double>& capture) const;
  ScalarField backward(const ScalarField& phi_T, double T, double t) const;

  double max_step() const { return max_dt_; }

 private:
  const FlowTrajectory* traj_;
  double max_dt_;
};

/// φ_t for terminal data φ_T (nonnegative, zero on the collar), 0 < t < T.
ScalarField conjugate_heat_solve(const FlowTrajectory& traj, const ScalarField& terminal, double T, double t);

/// Discrete point source of unit mass against dμ_s at a node.
ScalarField point_source(const MetricField& g, std::size_t node);

struct KernelField {
  std::size_t source = 0;
  double s = 0.0;
  double t = 0.0;
  ScalarField density;  // density against dμ at the evaluation time
  double mass = 0.0;    // Σ density √det g h^n
};

/// Φ(·, t; y, s) as a function of the target point: forward solution from a
/// unit point source at (y, s). Requires s < t and y outside the collar.
KernelField heat_kernel(const FlowTrajectory& traj, std::size_t y, double s, double t);

/// Φ(x, t; ·, s) as a function of the source point: conjugate solution from
/// a unit point source at (x, t). Its mass is the normalization ∫ Φ dμ_s(y).
KernelField heat_kernel_source_side(const FlowTrajectory& traj, std::size_t x, double s, double t);

/// Mass of the kernel outside the g_eval-ball of radius r about centre, against
/// dμ. The distance is the g_eval-length of the straight segment, which is exact
/// for constant metrics and first-order accurate in the deviation from one.
double kernel_tail(const KernelField& k, const MetricField& g_eval, const Vec& centre, double r);

struct TailFit {
  double D = 0.0;        // from the slope of log(tail) against r²
  double C2 = 0.0;       // smallest constant making the bound hold at every sampled r
  double residual = 0.0; // RMS of the log-linear fit
  bool holds = false;    // tail(r) ≤ C2 exp(-r²/(D τ)) at every sampled r
  std::vector<double> radii, tails;
};

TailFit fit_gaussian_tail(const KernelField& k, const MetricField& g_eval, const Vec& centre,
                          const std::vector<double>& radii);

}  // namespace rdtf
