#pragma once

#include <string>
#include <vector>

#include "rdtf/grid.hpp"

namespace rdtf {

struct SliceDiagnostics {
  double sup_deviation = 0.0;     // sup |g - δ|
  double sup_gradient = 0.0;      // sup |∂g|
  double sup_hessian = 0.0;       // sup |∂²g|
  double sup_scalar = 0.0;        // sup |R|
  double sup_riemann = 0.0;       // sup |Rm|
  double sup_scalar_gradient = 0.0;  // sup |∂R|
};

struct FlowSlice {
  double t = 0.0;
  MetricField metric;
  SliceDiagnostics diagnostics;
};

struct SchemeInfo {
  std::string name = "heun";
  double sigma = 0.1;  // dt = sigma * h^2 / max(1, sup λ_max(g^{-1}))
  double dt = 0.0;     // nominal step actually used
  std::size_t steps = 0;
};

/// Time-ordered metric slices of one flow. The t = 0 datum is kept apart
/// from the stored slices, which all have t > 0 and strictly increase.
class FlowTrajectory {
 public:
  FlowTrajectory() = default;
  explicit FlowTrajectory(MetricField initial) : initial_(std::move(initial)) {}

  const MetricField& initial() const { return initial_; }
  const GridSpec& grid() const { return initial_.grid(); }
  const std::vector<FlowSlice>& slices() const { return slices_; }
  std::size_t size() const { return slices_.size(); }
  bool empty() const { return slices_.empty(); }
  const FlowSlice& operator[](std::size_t i) const { return slices_[i]; }

  void append(FlowSlice slice);

  SchemeInfo& scheme() { return scheme_; }
  const SchemeInfo& scheme() const { return scheme_; }

  std::vector<double> times() const;
  double final_time() const { return slices_.empty() ? 0.0 : slices_.back().t; }

  /// Index of the slice whose time matches t to a relative tolerance; -1 if none.
  long find(double t, double rel_tol = 1e-9) const;
  /// Metric at time t by linear interpolation between neighbouring slices
  /// (the initial datum counts as the t = 0 slice).
  MetricField metric_at(double t) const;

 private:
  MetricField initial_;
  std::vector<FlowSlice> slices_;
  SchemeInfo scheme_;
};

/// Checkpoint: one binary field file per slice plus manifest.csv with times
/// and diagnostics. Returns the list of written files.
std::vector<std::string> save_trajectory(const FlowTrajectory& traj, const std::string& dir);
FlowTrajectory load_trajectory(const std::string& dir);

}  // namespace rdtf
