#include "rdtf/norms.hpp"

#include <algorithm>
#include <cmath>

#include "rdtf/field_ops.hpp"
#include "rdtf/linalg.hpp"

namespace rdtf {

NormResult c0_distance(const Sym2Field& g, const Sym2Field& h) {
  require_same_grid(g.grid(), h.grid());
  const int n = g.grid().dim;
  double m = 0.0;
  for (std::size_t node = 0; node < g.size(); ++node)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m = std::max(m, std::abs(g[node][i][j] - h[node][i][j]));
  return {NormKind::C0, m, 0.0, 0.0};
}

NormResult lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "Lp norm needs p >= 1");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return {NormKind::Lp, std::pow(s * f.grid().cell_volume(), 1.0 / p), p, 0.0};
}

NormResult weighted_w1p_norm(const ScalarField& deviation, const ScalarField& grad, double p, double tau) {
  require_same_grid(deviation.grid(), grad.grid());
  const GridSpec& grid = deviation.grid();
  const int n = grid.dim;
  if (!(p > n)) throw Error(ErrorCode::InvalidArgument, "weighted W^{1,p} norm requires p > n");
  double s = 0.0;
  for (std::size_t node = 0; node < deviation.size(); ++node) {
    if (deviation[node] == 0.0 && grad[node] == 0.0) continue;
    const Vec x = grid.position(node);
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
    const double bracket = std::sqrt(1.0 + r2);
    const double measure = std::pow(bracket, -n);
    s += std::pow(std::abs(deviation[node]) * std::pow(bracket, tau), p) * measure;
    s += std::pow(std::abs(grad[node]) * std::pow(bracket, tau + 1.0), p) * measure;
  }
  return {NormKind::W1pWeighted, std::pow(s * grid.cell_volume(), 1.0 / p), p, tau};
}

NormResult weighted_w1p_norm(const MetricField& g, double p, double tau) {
  return weighted_w1p_norm(deviation_magnitude(g), gradient_magnitude(g), p, tau);
}

std::vector<double> dyadic_radii(const GridSpec& grid) {
  std::vector<double> r;
  for (double v = grid.spacing(); v <= grid.half_width * (1.0 + 1e-12); v *= 2.0) r.push_back(v);
  return r;
}

namespace {

/// ∫_a^b of a piecewise-linear-in-time signal given at `times`.
double time_integral(const std::vector<double>& times, const std::vector<double>& vals, double a, double b) {
  b = std::min(b, times.back());
  if (b <= a) return 0.0;
  double s = 0.0;
  for (std::size_t m = 0; m + 1 < times.size(); ++m) {
    const double t0 = times[m], t1 = times[m + 1];
    const double lo = std::max(a, t0), hi = std::min(b, t1);
    if (hi <= lo) continue;
    const double slope = (vals[m + 1] - vals[m]) / (t1 - t0);
    const double v_lo = vals[m] + slope * (lo - t0);
    const double v_hi = vals[m] + slope * (hi - t0);
    s += 0.5 * (v_lo + v_hi) * (hi - lo);
  }
  return s;
}

/// Sum of `f` over the Euclidean ball of radius r around every node, using
/// prefix sums along the last axis.
std::vector<double> ball_sums(const GridSpec& grid, const std::vector<double>& f, double r) {
  const int n = grid.dim;
  const int N = grid.points;
  const double h = grid.spacing();
  const int reach = static_cast<int>(std::floor(r / h + 1e-9));
  std::vector<double> prefix(f.size() + f.size() / N);
  // prefix[row*(N+1) + k] = sum of the first k entries of that row
  const std::size_t rows = f.size() / N;
  for (std::size_t row = 0; row < rows; ++row) {
    double acc = 0.0;
    prefix[row * (N + 1)] = 0.0;
    for (int k = 0; k < N; ++k) {
      acc += f[row * N + k];
      prefix[row * (N + 1) + k + 1] = acc;
    }
  }
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t node = 0; node < f.size(); ++node) {
    const auto idx = grid.unflatten(node);
    double s = 0.0;
    const int o0_lo = n == 3 ? -reach : 0, o0_hi = n == 3 ? reach : 0;
    for (int o0 = o0_lo; o0 <= o0_hi; ++o0) {
      for (int o1 = -reach; o1 <= reach; ++o1) {
        const double rest = r * r / (h * h) - double(o0) * o0 - double(o1) * o1;
        if (rest < -1e-9) continue;
        const int half = static_cast<int>(std::floor(std::sqrt(std::max(rest, 0.0)) + 1e-9));
        std::array<int, kMaxDim> row_idx = idx;
        if (n == 3) {
          row_idx[0] += o0;
          row_idx[1] += o1;
          if (row_idx[0] < 0 || row_idx[0] >= N || row_idx[1] < 0 || row_idx[1] >= N) continue;
        } else {
          row_idx[0] += o1;
          if (row_idx[0] < 0 || row_idx[0] >= N) continue;
        }
        const int last = n - 1;
        const int lo = std::max(0, idx[last] - half);
        const int hi = std::min(N - 1, idx[last] + half);
        row_idx[last] = 0;
        const std::size_t row = grid.flatten(row_idx) / N;
        s += prefix[row * (N + 1) + hi + 1] - prefix[row * (N + 1) + lo];
      }
    }
    out[node] = s;
  }
  return out;
}

}  // namespace

NormResult x_norm(const FlowTrajectory& traj, XNormParts* parts) {
  if (traj.size() < 2) throw Error(ErrorCode::InvalidArgument, "X-norm needs at least two time slices");
  const GridSpec& grid = traj.grid();
  const int n = grid.dim;
  const Mat flat = identity_matrix(n);

  std::vector<double> times{0.0};
  std::vector<ScalarField> grad{gradient_magnitude(traj.initial())};
  double sup_linf = c0_distance(traj.initial(), Sym2Field(grid, flat)).value;
  for (const auto& s : traj.slices()) {
    times.push_back(s.t);
    grad.push_back(gradient_magnitude(s.metric));
    sup_linf = std::max(sup_linf, c0_distance(s.metric, Sym2Field(grid, flat)).value);
  }

  const double q = n + 4.0;
  const double vol = grid.cell_volume();
  XNormParts out;
  double best = -1.0;
  out.sup_linf = sup_linf;
  std::vector<double> sq(times.size()), pq(times.size());
  for (double r : dyadic_radii(grid)) {
    std::vector<double> energy(grid.node_count()), integral(grid.node_count());
    for (std::size_t node = 0; node < energy.size(); ++node) {
      for (std::size_t m = 0; m < times.size(); ++m) {
        sq[m] = grad[m][node] * grad[m][node];
        pq[m] = std::pow(grad[m][node], q);
      }
      energy[node] = time_integral(times, sq, 0.0, r * r);
      integral[node] = time_integral(times, pq, 0.5 * r * r, r * r);
    }
    const auto se = ball_sums(grid, energy, r);
    const auto si = ball_sums(grid, integral, r);
    for (std::size_t node = 0; node < se.size(); ++node) {
      const double e = std::pow(r, -0.5 * n) * std::sqrt(se[node] * vol);
      const double i = std::pow(r, 2.0 / q) * std::pow(si[node] * vol, 1.0 / q);
      if (e + i > best) {
        best = e + i;
        out.energy_term = e;
        out.integral_term = i;
        out.radius = r;
      }
    }
  }
  if (parts) *parts = out;
  return {NormKind::XNorm, out.sup_linf + out.energy_term + out.integral_term, 0.0, 0.0};
}

}  // namespace rdtf
