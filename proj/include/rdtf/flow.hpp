#pragma once

#include <vector>

#include "rdtf/grid.hpp"
#include "rdtf/trajectory.hpp"

namespace rdtf {

struct FlowOptions {
  double sigma = 0.1;        // dt = sigma h² / max(1, sup λ_max(g^{-1}))
  bool diagnostics = true;   // fill SliceDiagnostics for every stored slice
};

/// Explicit stability ceiling on sigma: 1/(2n).
double stability_limit(int dim);
double stable_time_step(const MetricField& g, double sigma);

/// ∂_t g = -2 Ric - L_X g evaluated at every node outside the collar; the
/// collar is held at δ, so its velocity is zero.
Sym2Field deturck_flow_velocity(const MetricField& g);

/// One Heun (RK2) step. Throws CflViolation when dt exceeds the explicit
/// ceiling and NotPositiveDefinite when a stage loses definiteness.
MetricField rdtf_step(const MetricField& g, double dt);

SliceDiagnostics diagnose(const MetricField& g);

/// Integrates from g0 to t_end and stores a slice at every requested time
/// (sorted, 0 < t ≤ t_end). Requires ‖g0 - δ‖_{C⁰} < 1 and a flat collar.
FlowTrajectory run_flow(const MetricField& g0, double t_end, std::vector<double> snapshot_times,
                        const FlowOptions& options = {});

/// t_end · 2^{-k/per_octave} for k = 0 .. count-1, returned ascending.
std::vector<double> geometric_snapshots(double t_end, int count, int per_octave = 1);

/// ∂_t R - (Δ R - ∂_X R + 2|Ric|²) at a stored slice, with a three-point
/// time difference over the neighbouring slices. Collar nodes report 0.
ScalarField scalar_evolution_residual(const FlowTrajectory& traj, double t);

}  // namespace rdtf
