#include "rdtf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdtf/curvature.hpp"
#include "rdtf/field_ops.hpp"
#include "rdtf/linalg.hpp"
#include "rdtf/norms.hpp"

namespace rdtf {

double stability_limit(int dim) { return 1.0 / (2.0 * dim); }

namespace {

double sup_inverse_eigenvalue(const MetricField& g) {
  const int n = g.grid().dim;
  double worst = 1.0;
  for (std::size_t node = 0; node < g.size(); ++node) {
    const auto [lo, hi] = eigen_range(g[node], n);
    if (!(lo > 0.0)) {
      std::ostringstream os;
      os << "metric lost positive definiteness at node " << node << " (min eigenvalue " << lo << ")";
      throw Error(ErrorCode::NotPositiveDefinite, os.str());
    }
    worst = std::max(worst, 1.0 / lo);
  }
  return worst;
}

MetricField axpy(const MetricField& g, double a, const Sym2Field& v) {
  MetricField out = g;
  const int n = g.grid().dim;
  for (std::size_t node = 0; node < g.size(); ++node)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[node][i][j] += a * v[node][i][j];
  return out;
}

}  // namespace

double stable_time_step(const MetricField& g, double sigma) {
  const double h = g.grid().spacing();
  return sigma * h * h / sup_inverse_eigenvalue(g);
}

Sym2Field deturck_flow_velocity(const MetricField& g) {
  const GridSpec& grid = g.grid();
  Sym2Field v(grid);
  for (std::size_t node = 0; node < g.size(); ++node) {
    if (grid.in_collar(node)) continue;
    const MetricJet jet = metric_jet(g, node, true);
    const LocalGeometry geo = local_geometry(jet, grid.dim, node, true);
    v[node] = deturck_velocity(geo, jet);
  }
  return v;
}

MetricField rdtf_step(const MetricField& g, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const double h = g.grid().spacing();
  const double ceiling = stability_limit(g.grid().dim) * h * h / sup_inverse_eigenvalue(g);
  if (dt > ceiling * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the explicit stability ceiling " << ceiling;
    throw Error(ErrorCode::CflViolation, os.str());
  }
  const Sym2Field k1 = deturck_flow_velocity(g);
  const MetricField stage = axpy(g, dt, k1);
  sup_inverse_eigenvalue(stage);
  const Sym2Field k2 = deturck_flow_velocity(stage);
  MetricField out = g;
  const int n = g.grid().dim;
  for (std::size_t node = 0; node < g.size(); ++node)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = g[node][i][j] + 0.5 * dt * (k1[node][i][j] + k2[node][i][j]);
        out[node][i][j] = out[node][j][i] = v;
      }
  sup_inverse_eigenvalue(out);
  if (g.time_tag) out.time_tag = *g.time_tag + dt;
  return out;
}

SliceDiagnostics diagnose(const MetricField& g) {
  SliceDiagnostics d;
  d.sup_deviation = c0_distance(g, MetricField::flat(g.grid())).value;
  d.sup_gradient = sup_abs(gradient_magnitude(g));
  d.sup_hessian = sup_abs(hessian_magnitude(g));
  const CurvatureBundle b = curvature(g);
  d.sup_scalar = sup_abs(b.scalar);
  d.sup_riemann = sup_abs(b.riem_norm);
  const VectorField dr = gradient(b.scalar);
  for (std::size_t node = 0; node < dr.size(); ++node) {
    double s = 0.0;
    for (int a = 0; a < g.grid().dim; ++a) s += dr[node][a] * dr[node][a];
    d.sup_scalar_gradient = std::max(d.sup_scalar_gradient, std::sqrt(s));
  }
  return d;
}

std::vector<double> geometric_snapshots(double t_end, int count, int per_octave) {
  if (!(t_end > 0.0) || count < 1 || per_octave < 1)
    throw Error(ErrorCode::InvalidArgument, "geometric snapshots need t_end > 0, count >= 1, per_octave >= 1");
  std::vector<double> t;
  for (int k = count - 1; k >= 0; --k) t.push_back(t_end * std::pow(2.0, -double(k) / per_octave));
  t.back() = t_end;
  return t;
}

FlowTrajectory run_flow(const MetricField& g0, double t_end, std::vector<double> snapshot_times,
                        const FlowOptions& options) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  if (!(options.sigma > 0.0) || options.sigma > stability_limit(g0.grid().dim))
    throw Error(ErrorCode::CflViolation, "flow sigma must lie in (0, 1/(2n)]");
  g0.validate();
  const double eps = c0_distance(g0, MetricField::flat(g0.grid())).value;
  if (!(eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "initial metric must satisfy ||g0 - delta||_C0 < 1");
  if (g0.collar_deviation() > 0.0)
    throw Error(ErrorCode::InvalidArgument, "initial metric is not flat on the boundary collar");

  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()), snapshot_times.end());
  for (double t : snapshot_times)
    if (!(t > 0.0) || t > t_end * (1.0 + 1e-12))
      throw Error(ErrorCode::InvalidArgument, "snapshot times must lie in (0, t_end]");
  if (snapshot_times.empty() || snapshot_times.back() < t_end) snapshot_times.push_back(t_end);

  MetricField initial = g0;
  initial.time_tag = 0.0;
  FlowTrajectory traj(initial);
  traj.scheme().sigma = options.sigma;
  traj.scheme().dt = stable_time_step(g0, options.sigma);

  MetricField g = initial;
  double t = 0.0;
  std::size_t steps = 0;
  for (double target : snapshot_times) {
    while (t < target * (1.0 - 1e-13)) {
      double dt = stable_time_step(g, options.sigma);
      if (t + dt > target) dt = target - t;
      g = rdtf_step(g, dt);
      t += dt;
      ++steps;
    }
    t = target;
    g.time_tag = target;
    FlowSlice slice{target, g, {}};
    if (options.diagnostics) slice.diagnostics = diagnose(g);
    traj.append(std::move(slice));
  }
  traj.scheme().steps = steps;
  return traj;
}

ScalarField scalar_evolution_residual(const FlowTrajectory& traj, double t) {
  const long k = traj.find(t);
  if (k <= 0 || k + 1 >= static_cast<long>(traj.size()))
    throw Error(ErrorCode::InvalidArgument, "residual time must be a stored slice with neighbours on both sides");
  const FlowSlice& prev = traj[k - 1];
  const FlowSlice& cur = traj[k];
  const FlowSlice& next = traj[k + 1];
  const double a = cur.t - prev.t, b = next.t - cur.t;
  const ScalarField r_prev = scalar_curvature(prev.metric);
  const ScalarField r_next = scalar_curvature(next.metric);
  const CurvatureBundle bundle = curvature(cur.metric);
  const GridSpec& grid = traj.grid();
  const int n = grid.dim;

  ScalarField res(grid);
  for (std::size_t node = 0; node < res.size(); ++node) {
    if (grid.in_collar(node)) continue;
    const double dRdt = -b / (a * (a + b)) * r_prev[node] + (b - a) / (a * b) * bundle.scalar[node] +
                        a / (b * (a + b)) * r_next[node];
    // Δ_g R - X·∂R collapses to g^{ij} ∂_i∂_j R because X = -g^{ij}Γ^k_ij.
    const Mat ginv = inverse(cur.metric[node], n);
    const ScalarJet rj = scalar_jet(bundle.scalar, node);
    double op = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) op += ginv[i][j] * rj.d2[i][j];
    res[node] = dRdt - (op + 2.0 * bundle.ricci_norm_sq[node]);
  }
  return res;
}

}  // namespace rdtf
