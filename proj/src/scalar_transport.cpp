#include "rdtf/scalar_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rdtf/linalg.hpp"

namespace rdtf {

namespace {

constexpr int kMaxEntries = 19;  // centre + 2n axis + 2·n(n-1) diagonal neighbours (n = 3)

struct Row {
  int count = 0;
  std::array<std::ptrdiff_t, kMaxEntries> offset{};
  std::array<double, kMaxEntries> weight{};
};

// Frozen-coefficient operator at one time level. Only active (non-collar)
// nodes carry a row.
struct Operator {
  std::vector<std::size_t> active;
  std::vector<Row> rows;
  std::vector<double> rho;  // √det g at every node
};

Operator build_operator(const MetricField& g) {
  const GridSpec& grid = g.grid();
  const int n = grid.dim;
  const double h2 = grid.spacing() * grid.spacing();
  Operator op;
  op.rho.resize(g.size());
  for (std::size_t node = 0; node < g.size(); ++node) {
    op.rho[node] = std::sqrt(det(g[node], n));
    if (grid.in_collar(node)) continue;
    const Mat gi = inverse(g[node], n);
    Row row;
    double centre = 0.0;
    auto push = [&row](std::ptrdiff_t off, double w) {
      row.offset[row.count] = off;
      row.weight[row.count] = w;
      ++row.count;
    };
    for (int a = 0; a < n; ++a) {
      double axis = gi[a][a];
      for (int b = 0; b < n; ++b)
        if (b != a) axis -= std::abs(gi[a][b]);
      if (axis < 0.0) {
        std::ostringstream os;
        os << "inverse metric is not diagonally dominant at node " << node << "; monotone stencil unavailable";
        throw Error(ErrorCode::InvalidArgument, os.str());
      }
      const auto sa = static_cast<std::ptrdiff_t>(grid.stride(a));
      push(sa, axis / h2);
      push(-sa, axis / h2);
      centre -= 2.0 * axis / h2;
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const double c = std::abs(gi[a][b]) / h2;
        if (c == 0.0) continue;
        const auto sa = static_cast<std::ptrdiff_t>(grid.stride(a));
        const auto sb = static_cast<std::ptrdiff_t>(grid.stride(b));
        const std::ptrdiff_t sgn = gi[a][b] > 0.0 ? 1 : -1;
        push(sa + sgn * sb, c);
        push(-sa - sgn * sb, c);
        centre -= 2.0 * c;
      }
    push(0, centre);
    op.active.push_back(node);
    op.rows.push_back(row);
  }
  return op;
}

// w ← (I + dt A) w on active nodes.
void forward_step(const Operator& op, double dt, ScalarField& w) {
  ScalarField out(w.grid());
  for (std::size_t r = 0; r < op.active.size(); ++r) {
    const std::size_t node = op.active[r];
    const Row& row = op.rows[r];
    double s = 0.0;
    for (int e = 0; e < row.count; ++e) s += row.weight[e] * w[node + row.offset[e]];
    out[node] = w[node] + dt * s;
  }
  w = std::move(out);
}

// φ_m = (I + dt A)^T (ρ_{m+1} φ_{m+1}) / ρ_m, restricted to active nodes.
void adjoint_step(const Operator& op_m, const std::vector<double>& rho_next, double dt, ScalarField& phi) {
  std::vector<double> v(phi.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rho_next[i] * phi[i];
  std::vector<double> acc(phi.size(), 0.0);
  for (std::size_t r = 0; r < op_m.active.size(); ++r) {
    const std::size_t node = op_m.active[r];
    const Row& row = op_m.rows[r];
    acc[node] += v[node];
    for (int e = 0; e < row.count; ++e) acc[node + row.offset[e]] += dt * row.weight[e] * v[node];
  }
  ScalarField out(phi.grid());
  for (std::size_t node : op_m.active) out[node] = acc[node] / op_m.rho[node];
  phi = std::move(out);
}

double sup_inverse_eigen(const MetricField& g) {
  double worst = 1.0;
  for (std::size_t node = 0; node < g.size(); ++node) {
    const auto [lo, hi] = eigen_range(g[node], g.grid().dim);
    if (!(lo > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "background metric is not positive definite");
    worst = std::max(worst, 1.0 / lo);
  }
  return worst;
}

// Uniform substeps of length ≤ max_dt between consecutive breakpoints.
std::vector<double> schedule(const std::vector<double>& breakpoints, double max_dt) {
  std::vector<double> tau{breakpoints.front()};
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    const double a = breakpoints[i - 1], b = breakpoints[i];
    if (b <= a) continue;
    const auto m = static_cast<std::size_t>(std::ceil((b - a) / max_dt - 1e-9));
    for (std::size_t k = 1; k < m; ++k) tau.push_back(a + (b - a) * double(k) / double(m));
    tau.push_back(b);
  }
  return tau;
}

void check_span(const FlowTrajectory& traj, double t) {
  if (t < 0.0 || t > traj.final_time() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time " << t << " lies outside the flow span [0, " << traj.final_time() << "]";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

ScalarPropagator::ScalarPropagator(const FlowTrajectory& traj, double sigma) : traj_(&traj) {
  if (traj.empty()) throw Error(ErrorCode::InvalidArgument, "scalar transport needs a non-empty trajectory");
  if (!(sigma > 0.0) || sigma > 1.0 / (2.0 * traj.grid().dim))
    throw Error(ErrorCode::CflViolation, "transport sigma must lie in (0, 1/(2n)]");
  double lam = sup_inverse_eigen(traj.initial());
  for (const auto& s : traj.slices()) lam = std::max(lam, sup_inverse_eigen(s.metric));
  const double h = traj.grid().spacing();
  max_dt_ = sigma * h * h / lam;
}

std::vector<ScalarField> ScalarPropagator::forward(const ScalarField& w_s, double s,
                                                   const std::vector<double>& capture) const {
  require_same_grid(w_s.grid(), traj_->grid());
  check_span(*traj_, s);
  std::vector<double> bp{s};
  for (double t : capture) {
    if (t < s) throw Error(ErrorCode::InvalidArgument, "forward capture times must not precede the start time");
    check_span(*traj_, t);
    bp.push_back(t);
  }
  std::sort(bp.begin(), bp.end());
  const std::vector<double> tau = schedule(bp, max_dt_);

  ScalarField w = w_s;
  for (std::size_t node = 0; node < w.size(); ++node)
    if (w.grid().in_collar(node)) w[node] = 0.0;
  std::vector<ScalarField> out(capture.size());
  auto store = [&](double t) {
    for (std::size_t c = 0; c < capture.size(); ++c)
      if (near(capture[c], t)) out[c] = w;
  };
  store(tau.front());
  for (std::size_t m = 0; m + 1 < tau.size(); ++m) {
    const Operator op = build_operator(traj_->metric_at(tau[m]));
    forward_step(op, tau[m + 1] - tau[m], w);
    store(tau[m + 1]);
  }
  return out;
}

ScalarField ScalarPropagator::forward(const ScalarField& w_s, double s, double t) const {
  return forward(w_s, s, std::vector<double>{t}).front();
}

std::vector<ScalarField> ScalarPropagator::backward(const ScalarField& phi_T, double T,
                                                    const std::vector<double>& capture) const {
  require_same_grid(phi_T.grid(), traj_->grid());
  check_span(*traj_, T);
  std::vector<double> bp{T};
  for (double t : capture) {
    if (t > T) throw Error(ErrorCode::InvalidArgument, "conjugate capture times must not exceed the terminal time");
    check_span(*traj_, t);
    bp.push_back(t);
  }
  std::sort(bp.begin(), bp.end());
  const std::vector<double> tau = schedule(bp, max_dt_);

  ScalarField phi = phi_T;
  for (std::size_t node = 0; node < phi.size(); ++node)
    if (phi.grid().in_collar(node)) phi[node] = 0.0;
  std::vector<ScalarField> out(capture.size());
  auto store = [&](double t) {
    for (std::size_t c = 0; c < capture.size(); ++c)
      if (near(capture[c], t)) out[c] = phi;
  };
  store(tau.back());
  std::vector<double> rho_next(phi.size());
  {
    const MetricField gT = traj_->metric_at(tau.back());
    for (std::size_t node = 0; node < phi.size(); ++node) rho_next[node] = std::sqrt(det(gT[node], gT.grid().dim));
  }
  for (std::size_t m = tau.size() - 1; m-- > 0;) {
    const Operator op = build_operator(traj_->metric_at(tau[m]));
    adjoint_step(op, rho_next, tau[m + 1] - tau[m], phi);
    rho_next = op.rho;
    store(tau[m]);
  }
  return out;
}

ScalarField ScalarPropagator::backward(const ScalarField& phi_T, double T, double t) const {
  return backward(phi_T, T, std::vector<double>{t}).front();
}

ScalarField conjugate_heat_solve(const FlowTrajectory& traj, const ScalarField& terminal, double T, double t) {
  if (!(t < T)) throw Error(ErrorCode::InvalidArgument, "conjugate solve needs t < T");
  for (std::size_t node = 0; node < terminal.size(); ++node) {
    if (terminal[node] < 0.0) throw Error(ErrorCode::InvalidArgument, "terminal data must be nonnegative");
    if (terminal.grid().in_collar(node) && terminal[node] != 0.0)
      throw Error(ErrorCode::InvalidArgument, "terminal data must vanish on the collar");
  }
  return ScalarPropagator(traj).backward(terminal, T, t);
}

ScalarField point_source(const MetricField& g, std::size_t node) {
  const GridSpec& grid = g.grid();
  if (node >= grid.node_count()) throw Error(ErrorCode::InvalidArgument, "source node out of range");
  if (grid.in_collar(node)) throw Error(ErrorCode::InvalidArgument, "source node lies in the boundary collar");
  ScalarField f(grid);
  f[node] = 1.0 / (std::sqrt(det(g[node], grid.dim)) * grid.cell_volume());
  return f;
}

namespace {

double mass_of(const ScalarField& f, const MetricField& g) {
  double m = 0.0;
  for (std::size_t node = 0; node < f.size(); ++node) m += f[node] * std::sqrt(det(g[node], g.grid().dim));
  return m * g.grid().cell_volume();
}

}  // namespace

KernelField heat_kernel(const FlowTrajectory& traj, std::size_t y, double s, double t) {
  if (!(s < t)) throw Error(ErrorCode::InvalidArgument, "heat kernel needs s < t");
  check_span(traj, s);
  check_span(traj, t);
  KernelField k;
  k.source = y;
  k.s = s;
  k.t = t;
  k.density = ScalarPropagator(traj).forward(point_source(traj.metric_at(s), y), s, t);
  k.mass = mass_of(k.density, traj.metric_at(t));
  return k;
}

KernelField heat_kernel_source_side(const FlowTrajectory& traj, std::size_t x, double s, double t) {
  if (!(s < t)) throw Error(ErrorCode::InvalidArgument, "heat kernel needs s < t");
  check_span(traj, s);
  check_span(traj, t);
  KernelField k;
  k.source = x;
  k.s = s;
  k.t = t;
  k.density = ScalarPropagator(traj).backward(point_source(traj.metric_at(t), x), t, s);
  k.mass = mass_of(k.density, traj.metric_at(s));
  return k;
}

namespace {

// Metric at an arbitrary point by multilinear interpolation of the nodes.
Mat interpolate_metric(const MetricField& g, const Vec& x) {
  const GridSpec& grid = g.grid();
  const int n = grid.dim;
  const double h = grid.spacing();
  std::array<int, kMaxDim> base{};
  Vec frac{};
  for (int a = 0; a < n; ++a) {
    const double u = std::clamp((x[a] + grid.half_width) / h, 0.0, double(grid.points - 1));
    base[a] = std::min(int(u), grid.points - 2);
    frac[a] = u - base[a];
  }
  Mat out{};
  for (int corner = 0; corner < (1 << n); ++corner) {
    std::array<int, kMaxDim> idx = base;
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] += bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    const Mat& m = g[grid.flatten(idx)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i][j] += w * m[i][j];
  }
  return out;
}

// g-length of the straight segment from c to x; the midpoint rule uses 16 samples.
double segment_length(const MetricField& g, const Vec& c, const Vec& x) {
  const int n = g.grid().dim;
  Vec v{};
  for (int a = 0; a < n; ++a) v[a] = x[a] - c[a];
  constexpr int kSamples = 16;
  double len = 0.0;
  for (int q = 0; q < kSamples; ++q) {
    const double s = (q + 0.5) / kSamples;
    Vec p{};
    for (int a = 0; a < n; ++a) p[a] = c[a] + s * v[a];
    const Mat m = interpolate_metric(g, p);
    double quad = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) quad += v[i] * m[i][j] * v[j];
    len += std::sqrt(std::max(quad, 0.0));
  }
  return len / kSamples;
}

}  // namespace

double kernel_tail(const KernelField& k, const MetricField& g_eval, const Vec& centre, double r) {
  require_same_grid(k.density.grid(), g_eval.grid());
  const GridSpec& grid = g_eval.grid();
  const int n = grid.dim;
  double m = 0.0;
  for (std::size_t node = 0; node < k.density.size(); ++node) {
    if (k.density[node] == 0.0) continue;
    if (segment_length(g_eval, centre, grid.position(node)) > r)
      m += k.density[node] * std::sqrt(det(g_eval[node], n));
  }
  return m * grid.cell_volume();
}

TailFit fit_gaussian_tail(const KernelField& k, const MetricField& g_eval, const Vec& centre,
                          const std::vector<double>& radii) {
  const double tau = k.t - k.s;
  TailFit fit;
  std::vector<double> xs, ys;
  for (double r : radii) {
    const double tail = kernel_tail(k, g_eval, centre, r);
    fit.radii.push_back(r);
    fit.tails.push_back(tail);
    if (tail > 1e-14) {
      xs.push_back(r * r);
      ys.push_back(std::log(tail));
    }
  }
  if (xs.size() < 3) throw Error(ErrorCode::InsufficientRange, "kernel tail is resolved at fewer than 3 radii");
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(ys.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + slope * (xs[i] - mx));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / double(xs.size()));
  if (!(slope < 0.0)) {
    fit.D = std::numeric_limits<double>::infinity();
    fit.holds = false;
    return fit;
  }
  fit.D = -1.0 / (slope * tau);
  for (std::size_t i = 0; i < fit.radii.size(); ++i)
    fit.C2 = std::max(fit.C2, fit.tails[i] * std::exp(fit.radii[i] * fit.radii[i] / (fit.D * tau)));
  fit.holds = true;
  for (std::size_t i = 0; i < fit.radii.size(); ++i)
    if (fit.tails[i] > fit.C2 * std::exp(-fit.radii[i] * fit.radii[i] / (fit.D * tau)) * (1.0 + 1e-12))
      fit.holds = false;
  return fit;
}

}  // namespace rdtf
