#include "rdtf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "rdtf/curvature.hpp"
#include "rdtf/distance.hpp"
#include "rdtf/field_ops.hpp"
#include "rdtf/flow.hpp"
#include "rdtf/linalg.hpp"
#include "rdtf/norms.hpp"
#include "rdtf/scalar_transport.hpp"

namespace rdtf {

namespace {

double dist(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double resolved_time_floor(const FlowTrajectory& traj) { return traj.scheme().dt * (1.0 - 1e-9); }

void validate_beta(double beta) {
  if (!(beta > 0.0 && beta < 0.5))
    throw Error(ErrorCode::InvalidArgument, "beta must lie in (0, 1/2) (got " + num(beta) + ")");
}

double ShrinkingBallSchedule::radius(int i) const { return std::pow(t / std::ldexp(1.0, i), beta); }

double ShrinkingBallSchedule::accumulated(int k) const {
  double s = 0.0;
  for (int i = 1; i <= k; ++i) s += radius(i);
  return s;
}

double ShrinkingBallSchedule::limit() const { return std::pow(t, beta) / (std::pow(2.0, beta) - 1.0); }

ShrinkingBallSchedule make_schedule(std::size_t x, double beta, double t, int depth) {
  validate_beta(beta);
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "schedule base time must be positive");
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "schedule depth must be >= 1");
  return {x, beta, t, depth};
}

double lambda_exponent(double beta, double gamma) { return -1.0 - (2.0 * beta - 1.0) * gamma; }

double tail_series(double t, double beta, double D, int depth) {
  validate_beta(beta);
  if (!(t > 0.0) || !(D > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail series needs t > 0 and D > 0");
  double sum = 0.0;
  for (int i = 1; i <= depth; ++i) {
    const double s = t / std::ldexp(1.0, i);
    // r_i² / (D s) = s^{2β-1} / D
    const double log_term = -std::log(s) - std::pow(s, 2.0 * beta - 1.0) / D;
    if (log_term < -745.0) break;  // later terms are smaller still
    sum += std::exp(log_term);
  }
  return sum;
}

TailConstant tail_constant(double beta, double gamma, double D) {
  validate_beta(beta);
  TailConstant c;
  c.lambda = lambda_exponent(beta, gamma);
  if (!(c.lambda > 0.0))
    throw Error(ErrorCode::InvalidArgument, "gamma must exceed 1/(1 - 2 beta) so that lambda > 0");
  const double geometric = 1.0 / (std::pow(2.0, c.lambda) - 1.0);
  c.unit = std::pow(D, gamma) * geometric;
  c.sharp = std::pow(gamma / std::numbers::e, gamma) * std::pow(D, gamma) * geometric;
  return c;
}

FlowConstants flow_constants(const FlowTrajectory& traj) {
  FlowConstants c;
  const int n = traj.grid().dim;
  auto spread = [&](const MetricField& g) {
    for (std::size_t node = 0; node < g.size(); ++node) {
      const auto [lo, hi] = eigen_range(g[node], n);
      c.c2eps = std::max({c.c2eps, hi - 1.0, 1.0 / lo - 1.0});
    }
  };
  spread(traj.initial());
  for (const auto& s : traj.slices()) {
    spread(s.metric);
    c.C1 = std::max(c.C1, s.t * s.diagnostics.sup_scalar);
    c.c3eps = std::max(c.c3eps, s.t * s.diagnostics.sup_riemann);
    c.c6eps = std::max(c.c6eps, std::pow(s.t, 1.5) * s.diagnostics.sup_scalar_gradient);
  }
  return c;
}

ReplayResult iteration_replay(const FlowTrajectory& traj, std::size_t x, double beta, double t, double C1C2,
                              double D) {
  validate_beta(beta);
  const long base = traj.find(t);
  if (base < 0) throw Error(ErrorCode::InvalidArgument, "replay base time " + num(t) + " is not a stored slice");
  const GridSpec& grid = traj.grid();
  const int n = grid.dim;
  const double h = grid.spacing();
  const ShrinkingBallSchedule sched = make_schedule(x, beta, t, 1);
  const Vec px = grid.position(x);

  ReplayResult out;
  out.R_xt = scalar_curvature(traj[base].metric)[x];
  std::size_t prev = x;
  double series = 0.0, rho = 0.0;
  for (int k = 1;; ++k) {
    const double tk = t / std::ldexp(1.0, k);
    const double rk = sched.radius(k);
    if (rk < 2.0 * h) {
      out.stop_reason = "resolution: r_" + std::to_string(k) + " < 2h";
      break;
    }
    const long idx = traj.find(tk);
    if (idx < 0) {
      out.stop_reason = "no stored slice at t/2^" + std::to_string(k);
      break;
    }
    const ScalarField R = scalar_curvature(traj[idx].metric);
    const Vec pp = grid.position(prev);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = prev;
    for (std::size_t node = 0; node < R.size(); ++node) {
      if (dist(grid.position(node), pp, n) > rk) continue;
      if (R[node] < best) {
        best = R[node];
        arg = node;
      }
    }
    rho += rk;
    series += std::exp(std::log(std::ldexp(1.0, k) / t) - rk * rk / (D * tk));
    ReplayStep s;
    s.k = k;
    s.node = arg;
    s.time = tk;
    s.radius = rk;
    s.accumulated = rho;
    s.a_k = best;
    s.series = series;
    s.lower = best - 2.0 * C1C2 * series;
    s.inequality = out.R_xt >= s.lower;
    s.in_ball = dist(grid.position(arg), px, n) <= rho * (1.0 + 1e-10);
    out.steps.push_back(s);
    prev = arg;
  }
  out.all_hold = !out.steps.empty();
  for (const auto& s : out.steps) out.all_hold = out.all_hold && s.inequality && s.in_ball;
  return out;
}

BetaWeakResult beta_weak_estimate(const FlowTrajectory& traj, std::size_t x, double beta,
                                  const std::vector<double>& C_ladder, double lambda) {
  validate_beta(beta);
  if (C_ladder.empty()) throw Error(ErrorCode::InvalidArgument, "C ladder is empty");
  std::vector<double> ladder = C_ladder;
  std::sort(ladder.begin(), ladder.end());
  if (!(ladder.front() > 0.0)) throw Error(ErrorCode::InvalidArgument, "C ladder entries must be positive");
  const GridSpec& grid = traj.grid();
  const int n = grid.dim;
  const double h = grid.spacing();

  const double t_floor = resolved_time_floor(traj);
  std::vector<std::size_t> slices;
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (ladder.front() * std::pow(traj[i].t, beta) >= h && traj[i].t >= t_floor) slices.push_back(i);
  if (slices.empty())
    throw Error(ErrorCode::ResolutionFloor,
                "no stored time has both C t^beta >= h and t >= one flow step (" + num(t_floor) + ")");
  const double t_min = traj[slices.front()].t;
  while (traj[slices.back()].t > 10.0 * t_min * (1.0 + 1e-12)) slices.pop_back();

  BetaWeakResult out;
  out.lambda = lambda;
  for (std::size_t i : slices) out.times.push_back(traj[i].t);
  const Vec px = grid.position(x);
  std::vector<ScalarField> R;
  for (std::size_t i : slices) R.push_back(scalar_curvature(traj[i].metric));

  for (double C : ladder) {
    BetaWeakPerC pc;
    pc.C = C;
    for (std::size_t j = 0; j < slices.size(); ++j) {
      const double r = C * std::pow(out.times[j], beta);
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t node = 0; node < R[j].size(); ++node)
        if (!grid.in_collar(node) && dist(grid.position(node), px, n) <= r) m = std::min(m, R[j][node]);
      pc.minima.push_back(m);
    }
    pc.raw = *std::min_element(pc.minima.begin(), pc.minima.end());
    if (pc.minima.size() >= 2) {
      std::vector<double> tl;
      for (double t : out.times) tl.push_back(std::pow(t, lambda));
      pc.extrapolated = linear_fit(tl, pc.minima).first;
    } else {
      pc.extrapolated = pc.raw;
    }
    out.per_c.push_back(pc);
  }
  out.value = out.raw = std::numeric_limits<double>::infinity();
  for (const auto& pc : out.per_c) {
    out.value = std::min(out.value, pc.extrapolated);
    out.raw = std::min(out.raw, pc.raw);
  }
  // Inner inf over the finite ladder is attained by the largest ball.
  out.swapped_raw = out.per_c.back().raw;
  out.swapped_extrapolated = out.per_c.back().extrapolated;
  return out;
}

FitReport lower_bound_decay_fit(const FlowTrajectory& traj, std::size_t x, double kappa, double beta, double gamma,
                                double min_lambda, double slack) {
  validate_beta(beta);
  std::vector<double> t, d;
  const double t_floor = resolved_time_floor(traj);
  for (const auto& s : traj.slices()) {
    if (s.t < t_floor) continue;
    t.push_back(s.t);
    d.push_back(std::max(kappa - scalar_curvature(s.metric)[x], 0.0));
  }
  FitReport r;
  r.quantity = "deficit";
  r.predicted = lambda_exponent(beta, gamma);
  const double worst = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  if (worst <= slack) {
    r.pass = true;
    r.samples = t.size();
    r.t_min = t.empty() ? 0.0 : t.front();
    r.t_max = t.empty() ? 0.0 : t.back();
    r.note = "bound slack: deficit identically zero";
    return r;
  }
  try {
    r = exponent_report("deficit", r.predicted, t, d, std::numeric_limits<double>::infinity());
    r.pass = r.fitted > std::max(0.0, min_lambda);
  } catch (const Error& e) {
    r.pass = false;
    r.note = e.what();
  }
  return r;
}

bool Region::contains(const Vec& p, int dim) const {
  const double d = dist(p, centre, dim);
  return r_in == 0.0 ? d <= r_out : (d > r_in && d <= r_out);
}

double Region::distance(const Region& a, const Region& b, int dim) {
  const double c = dist(a.centre, b.centre, dim);
  if (a.r_in == 0.0 && b.r_in == 0.0) return std::max(0.0, c - a.r_out - b.r_out);
  const Region& ball = a.r_in == 0.0 ? a : b;
  const Region& ring = a.r_in == 0.0 ? b : a;
  if (ball.r_in != 0.0) throw Error(ErrorCode::InvalidArgument, "region distance needs at least one ball");
  return std::max({0.0, ring.r_in - c - ball.r_out, c - ball.r_out - ring.r_out});
}

DaviesResult davies_check(const FlowTrajectory& traj, const Region& U1, const Region& U2, double t, double T,
                          const FlowConstants& k) {
  if (!(0.0 < t && t < T)) throw Error(ErrorCode::InvalidArgument, "Davies check needs 0 < t < T");
  const GridSpec& grid = traj.grid();
  const int n = grid.dim;
  ScalarField ind(grid);
  bool overlap = false;
  for (std::size_t node = 0; node < ind.size(); ++node) {
    const Vec p = grid.position(node);
    const bool a = U1.contains(p, n), b = U2.contains(p, n);
    overlap = overlap || (a && b);
    if (a && !grid.in_collar(node)) ind[node] = 1.0;
  }
  if (overlap) throw Error(ErrorCode::InvalidArgument, "Davies regions U1 and U2 overlap");

  const ScalarField phi = ScalarPropagator(traj).backward(ind, T, t);
  const MetricField gt = traj.metric_at(t), gT = traj.metric_at(T);
  DaviesResult r;
  r.t = t;
  r.T = T;
  const double cell = grid.cell_volume();
  for (std::size_t node = 0; node < ind.size(); ++node) {
    const Vec p = grid.position(node);
    if (U2.contains(p, n)) {
      const double rho = std::sqrt(det(gt[node], n));
      r.lhs += phi[node] * rho * cell;
      r.vol_t_U2 += rho * cell;
    }
    if (U1.contains(p, n)) r.vol_T_U1 += std::sqrt(det(gT[node], n)) * cell;
  }
  r.distance = Region::distance(U1, U2, n);
  const double grow = std::pow(T / t, k.c3eps / 2.0) * std::sqrt(r.vol_T_U1 * r.vol_t_U2);
  const double spread = (1.0 + k.c2eps) * (1.0 + k.c2eps) * (T - t);
  r.rhs = grow * std::exp(-r.distance * r.distance / (2.0 * spread));
  r.rhs_standard = grow * std::exp(-r.distance * r.distance / (4.0 * spread));
  r.holds = r.lhs <= r.rhs;
  r.holds_standard = r.lhs <= r.rhs_standard;
  const double omega = std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  r.vol_bound_plain = std::pow(1.0 + k.c2eps, n / 2.0) * std::pow(U1.r_out, n);
  r.vol_bound_ball = omega * r.vol_bound_plain;
  r.vol_plain_ok = r.vol_T_U1 <= r.vol_bound_plain;
  r.vol_ball_ok = r.vol_T_U1 <= r.vol_bound_ball;
  return r;
}

std::vector<FitReport> decay_fits(const FlowTrajectory& traj, double t_lo, double t_hi, double tolerance) {
  std::vector<double> t, grad, hess, scal, dscal;
  for (const auto& s : traj.slices()) {
    if (s.t < t_lo * (1.0 - 1e-12) || s.t > t_hi * (1.0 + 1e-12)) continue;
    t.push_back(s.t);
    grad.push_back(s.diagnostics.sup_gradient);
    hess.push_back(s.diagnostics.sup_hessian);
    scal.push_back(s.diagnostics.sup_scalar);
    dscal.push_back(s.diagnostics.sup_scalar_gradient);
  }
  return {decay_report("sup|dg|", -0.5, t, grad, tolerance),
          decay_report("sup|d2g|", -1.0, t, hess, tolerance),
          decay_report("sup|R|", -1.0, t, scal, tolerance),
          decay_report("sup|dR|", -1.5, t, dscal, tolerance)};
}

double local_gradient_integral(const MetricField& g, double p) {
  const GridSpec& grid = g.grid();
  const int n = grid.dim;
  const ScalarField dg = gradient_magnitude(g);
  ScalarField w(grid);
  for (std::size_t node = 0; node < w.size(); ++node) w[node] = std::pow(dg[node], p);
  if (2.0 * grid.half_width * std::sqrt(double(n)) <= 1.0) return integrate(w);
  // Base points on every other node; balls of radius 1.
  double best = 0.0;
  for (std::size_t base = 0; base < w.size(); ++base) {
    const auto idx = grid.unflatten(base);
    bool coarse = true;
    for (int a = 0; a < n; ++a) coarse = coarse && idx[a] % 2 == 0;
    if (!coarse) continue;
    const Vec c = grid.position(base);
    double s = 0.0;
    for (std::size_t node = 0; node < w.size(); ++node)
      if (w[node] != 0.0 && dist(grid.position(node), c, n) <= 1.0) s += w[node];
    best = std::max(best, s);
  }
  return best * grid.cell_volume();
}

W1pCheck w1p_estimates_check(const FlowTrajectory& traj, double p, double A, double t_lo, double t_hi,
                             double tolerance) {
  const int n = traj.grid().dim;
  if (!(p > n)) throw Error(ErrorCode::InvalidArgument, "W^{1,p} estimates need p > n");
  if (!(A > 0.0)) throw Error(ErrorCode::InvalidArgument, "W^{1,p} bound A must be positive");
  std::vector<double> t, integral, grad, hess;
  W1pCheck out;
  out.A = A;
  for (const auto& s : traj.slices()) {
    if (s.t < t_lo * (1.0 - 1e-12) || s.t > t_hi * (1.0 + 1e-12)) continue;
    t.push_back(s.t);
    integral.push_back(local_gradient_integral(s.metric, p));
    grad.push_back(s.diagnostics.sup_gradient);
    hess.push_back(s.diagnostics.sup_hessian);
    out.integral_ratio = std::max(out.integral_ratio, integral.back() / A);
  }
  out.integral = decay_report("sup_x int_B(x,1)|dg|^p", 0.0, t, integral, tolerance);
  out.gradient = decay_report("sup|dg|", -n / (2.0 * p), t, grad, tolerance);
  out.hessian = decay_report("sup|d2g|", -n / (4.0 * p) - 0.75, t, hess, tolerance);
  return out;
}

void validate_theorem45(const Theorem45Params& p) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  validate_beta(p.beta);
  if (!(p.gamma > 1.0 / (1.0 - 2.0 * p.beta)))
    fail("gamma must exceed 1/(1 - 2 beta) = " + num(1.0 / (1.0 - 2.0 * p.beta)));
  validate_cone(p.grid.dim, p.cone);
  if (!(p.chi_inner > 0.0 && p.chi_inner < p.chi_outer)) fail("chi radii must satisfy 0 < inner < outer");
  if (!(p.chi_outer < p.grid.half_width - p.grid.collar_width))
    fail("chi support must stay inside the active region (outer < L - collar)");
  if (!(p.T > 0.0)) fail("terminal time T must be positive");
  if (p.snapshots < 3 || p.per_octave < 1) fail("pipeline needs >= 3 snapshots and per_octave >= 1");
  if (!(p.C > 0.0)) fail("ball constant C must be positive");
  if (!(p.eta > 0.0)) fail("eta must be positive");
  if (p.davies_pairs < 1) fail("davies_pairs must be >= 1");
  if (!(p.davies_domain_U2.r_in > 0.0 && p.davies_domain_U2.r_in < p.davies_domain_U2.r_out))
    fail("Davies annulus needs 0 < r_in < r_out");
}

namespace {

ScalarField ball_profile(const GridSpec& grid, const Vec& centre, double radius, const CutoffProfile& phi) {
  ScalarField u(grid);
  for (std::size_t node = 0; node < u.size(); ++node) {
    if (grid.in_collar(node)) continue;
    u[node] = phi.value(dist(grid.position(node), centre, grid.dim) / radius);
  }
  return u;
}

}  // namespace

Theorem45Result theorem45_pipeline(const Theorem45Params& p) {
  validate_theorem45(p);
  const GridSpec& grid = p.grid;
  const int n = grid.dim;
  Theorem45Result out;

  const std::size_t x0 = grid.nearest_node(p.cone.centre);
  const Vec c0 = grid.position(x0);
  const MetricField g_local = make_w1p_cone(grid, p.cone);
  const CutoffProfile chi = make_cutoff(CutoffKind::ChiSpace, p.chi_inner, p.chi_outer, c0);
  const MetricField g0 = glue_to_flat(g_local, chi);
  out.eps = c0_distance(g0, MetricField::flat(grid)).value;

  // Weak lower bound on a battery of five bumps inside {χ = 1}.
  const CutoffProfile phi = make_cutoff(CutoffKind::PhiRadial, 0.5, 1.0);
  const double bump = 0.3 * p.chi_inner;
  std::vector<Vec> centres{c0};
  for (int a = 0; a < n && centres.size() < 5; ++a)
    for (double sgn : {1.0, -1.0}) {
      if (centres.size() >= 5) break;
      Vec c = c0;
      c[a] += sgn * 0.5 * p.chi_inner;
      centres.push_back(c);
    }
  out.battery_ok = true;
  for (const Vec& c : centres) {
    const ScalarField u = ball_profile(grid, c, bump, phi);
    const double m = weak_lower_bound_margin(g0, u, p.kappa);
    out.battery_margins.push_back(m);
    out.battery_ok = out.battery_ok && m >= -p.battery_tolerance * integrate(u);
  }

  const FlowTrajectory traj = run_flow(g0, p.T, geometric_snapshots(p.T, p.snapshots, p.per_octave));
  out.constants = flow_constants(traj);
  std::vector<double> times;
  for (double t : traj.times())
    if (t >= resolved_time_floor(traj)) times.push_back(t);
  if (times.size() < 3) throw Error(ErrorCode::ResolutionFloor, "fewer than 3 stored times beyond the first flow step");

  const ScalarField terminal = ball_profile(grid, c0, p.C * std::pow(p.T, p.beta), phi);
  const ScalarPropagator prop(traj);
  std::vector<ScalarField> phis = prop.backward(terminal, p.T, times);
  std::vector<ScalarField> psis;
  for (std::size_t i = 0; i < times.size(); ++i)
    psis.push_back(distance_cutoff(geodesic_distance(traj[traj.find(times[i])].metric, x0), phi, times[i], p.gamma));

  out.energy = energy_functional(traj, times, phis, psis, p.kappa);
  out.energy.beta = p.beta;
  out.energy.gamma = p.gamma;
  out.energy.T = p.T;
  const auto& E = out.energy.energy;
  out.energy_nonnegative = std::all_of(E.begin(), E.end(), [](double e) { return e >= 0.0; });

  out.c4 = phi.c4;
  out.c3 = gluing_error_check(g_local, chi, phis.front());
  out.eta_threshold = ((n * p.gamma + out.constants.c3eps) / 2.0 + 1.0) / (2.0 * p.gamma);
  out.eta_admissible = p.eta > out.eta_threshold;

  // dE/dt at interior samples against c₄ t^{2γ} E + c₅ε t^{-2} ∫_{supp φ'} φ_t dμ_t.
  // c₅ε is fitted as the smallest constant covering every sample with a
  // nonzero annulus mass; samples without one are a genuine check.
  const double Emax = *std::max_element(E.begin(), E.end());
  std::vector<double> excess(times.size(), 0.0);
  double c5 = 0.0;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double a = times[i] - times[i - 1], b = times[i + 1] - times[i];
    const double d = -b / (a * (a + b)) * E[i - 1] + (b - a) / (a * b) * E[i] + a / (b * (a + b)) * E[i + 1];
    const double base = out.c4 * std::pow(times[i], 2.0 * p.gamma) * E[i];
    out.dEdt.push_back(d);
    excess[i] = d - base;
    const double ann = out.energy.annulus_mass[i];
    if (ann > 0.0) c5 = std::max(c5, excess[i] / (ann / (times[i] * times[i])));
  }
  out.energy_inequality = true;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double bound = out.c4 * std::pow(times[i], 2.0 * p.gamma) * E[i] +
                         c5 * out.energy.annulus_mass[i] / (times[i] * times[i]);
    // Slack for the three-point difference: 1e-3 of the energy scale per unit log-time.
    const double tol = 1e-3 * Emax / times[i];
    out.dEdt_bound.push_back(bound + tol);
    out.energy_inequality = out.energy_inequality && out.dEdt[i - 1] <= bound + tol;
  }

  out.E_small = E.front();
  out.limit_ok = out.E_small <= 5.0 * out.c3 * out.eps;
  const double growth = std::exp(out.c4 / (1.0 + 2.0 * p.gamma) * std::pow(p.T, 1.0 + 2.0 * p.gamma));
  out.gronwall_ok = true;
  for (double e : E) out.gronwall_ok = out.gronwall_ok && E.back() <= growth * e * (1.0 + 1e-9) + 1e-300;

  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<std::size_t> pick(0, times.size() - 1);
  Region domain_U2 = p.davies_domain_U2;
  domain_U2.centre = c0;
  out.davies_ok = out.davies_domain_ok = out.davies_domain_standard_ok = true;
  const double c2 = out.constants.c2eps;
  for (int k = 0; k < p.davies_pairs; ++k) {
    std::size_t i = pick(rng), j = pick(rng);
    while (i == j) j = pick(rng);
    if (i > j) std::swap(i, j);
    const double t = times[i], T = times[j];
    const Region U1{c0, 0.0, p.C * std::pow(T, p.beta)};
    const double scale = std::pow(t, -p.gamma);
    const Region U2{c0, scale / (2.0 * (1.0 + c2)), c2 < 1.0 ? scale / (1.0 - c2) : 2.0 * scale};
    out.davies.push_back(davies_check(traj, U1, U2, t, T, out.constants));
    out.davies_ok = out.davies_ok && out.davies.back().holds;
    out.davies_domain.push_back(davies_check(traj, U1, domain_U2, t, T, out.constants));
    out.davies_domain_ok = out.davies_domain_ok && out.davies_domain.back().holds;
    out.davies_domain_standard_ok = out.davies_domain_standard_ok && out.davies_domain.back().holds_standard;
  }

  out.beta_weak = beta_weak_estimate(traj, x0, p.beta, p.C_ladder);
  out.deficit = lower_bound_decay_fit(traj, x0, p.kappa, p.beta, p.gamma);
  out.pass = out.battery_ok && out.eta_admissible && out.energy_nonnegative && out.energy_inequality &&
             out.limit_ok && out.gronwall_ok && out.davies_ok && out.beta_weak.value >= p.kappa - 0.02;
  return out;
}

}  // namespace rdtf
