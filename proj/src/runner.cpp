#include "rdtf/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "rdtf/field_ops.hpp"
#include "rdtf/flow.hpp"
#include "rdtf/norms.hpp"
#include "rdtf/scalar_transport.hpp"
#include "rdtf/verify.hpp"
#include "rdtf/weak_scalar.hpp"

#ifndef RDTF_VERSION_STRING
#define RDTF_VERSION_STRING "0.0.0"
#endif

namespace rdtf {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Config, field + ": " + what);
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) config_error(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) config_error(path + "." + key, "missing required number");
  return get_number(obj, key, path, 0.0);
}

int get_int(const json& obj, const std::string& key, const std::string& path, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) config_error(path + "." + key, "expected an integer");
  return obj[key].get<int>();
}

Vec get_point(const json& obj, const std::string& key, const std::string& path, int dim) {
  Vec v{};
  if (!obj.contains(key)) return v;
  const json& a = obj[key];
  if (!a.is_array() || static_cast<int>(a.size()) != dim) config_error(path + "." + key, "expected an array of length n");
  for (int i = 0; i < dim; ++i) {
    if (!a[i].is_number()) config_error(path + "." + key, "expected numeric coordinates");
    v[i] = a[i].get<double>();
  }
  return v;
}

std::vector<double> get_ladder(const json& obj, const std::string& path) {
  if (!obj.contains("C_ladder")) return kDefaultCLadder;
  const json& a = obj["C_ladder"];
  if (!a.is_array() || a.empty()) config_error(path + ".C_ladder", "expected a non-empty array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) config_error(path + ".C_ladder", "entries must be positive numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ConeParams cone_params(const json& m, int dim) {
  const std::string path = "metric.params";
  ConeParams c;
  c.centre = get_point(m, "center", path, dim);
  c.sigma = get_number(m, "sigma", path, c.sigma);
  c.amplitude = get_number(m, "amplitude", path, c.amplitude);
  c.p = get_number(m, "p", path, c.p);
  c.bump_inner = get_number(m, "bump_inner", path, c.bump_inner);
  c.bump_outer = get_number(m, "bump_outer", path, c.bump_outer);
  if (m.contains("direction")) {
    const std::string d = m["direction"].is_string() ? m["direction"].get<std::string>() : "";
    if (d == "identity")
      c.direction = ConeDirection::Identity;
    else if (d == "e11")
      c.direction = ConeDirection::E11;
    else
      config_error(path + ".direction", "expected \"identity\" or \"e11\"");
  }
  return c;
}

// The pipeline builds its own glued cone; a flat config means amplitude 0.
ConeParams theorem45_cone(const ExperimentConfig& cfg, int dim) {
  ConeParams c = cone_params(cfg.metric_params, dim);
  if (cfg.generator == "flat") c.amplitude = 0.0;
  return c;
}

MetricField generate_metric(const ExperimentConfig& cfg) {
  const GridSpec& grid = cfg.grid;
  const json& m = cfg.metric_params;
  if (cfg.generator == "flat") return MetricField::flat(grid);
  if (cfg.generator == "cone") return make_w1p_cone(grid, cone_params(m, grid.dim));
  // conformal: g = exp(2 a exp(-|x-c|²/w²) η) δ, η a smoothstep bump
  const double a = get_number(m, "amplitude", "metric.params", 0.1);
  const double w = get_number(m, "width", "metric.params", 0.5);
  const Vec c = get_point(m, "center", "metric.params", grid.dim);
  const CutoffProfile eta = make_cutoff(CutoffKind::ChiSpace, get_number(m, "bump_inner", "metric.params", 0.5),
                                        get_number(m, "bump_outer", "metric.params", 0.75), c);
  MetricField g(grid);
  for (std::size_t node = 0; node < g.size(); ++node) {
    const Vec x = grid.position(node);
    double r2 = 0.0;
    for (int k = 0; k < grid.dim; ++k) r2 += (x[k] - c[k]) * (x[k] - c[k]);
    const double e = std::exp(2.0 * a * std::exp(-r2 / (w * w)) * eta.at(x, grid.dim));
    for (int k = 0; k < grid.dim; ++k) g[node][k][k] = e;
  }
  return g;
}

void validate_experiment(const ExperimentConfig& cfg, const ExperimentSpec& e, const std::string& path) {
  const json& p = e.params;
  const int n = cfg.grid.dim;
  auto beta_check = [&](double beta) {
    if (!(beta > 0.0 && beta < 0.5))
      config_error(path + ".beta", "beta must lie in (0, 1/2) as required by Definition 2.3 (got " + std::to_string(beta) + ")");
  };
  auto range_check = [&]() {
    const double lo = get_number(p, "t_lo", path, 0.0), hi = get_number(p, "t_hi", path, cfg.t_end);
    if (!(lo > 0.0 && lo < hi && hi <= cfg.t_end * (1.0 + 1e-12)))
      config_error(path + ".t_lo/t_hi", "need 0 < t_lo < t_hi <= flow.t_end");
    if (std::log10(hi / lo) < kMinFitDecades) config_error(path + ".t_lo/t_hi", "fit window must span >= 1.5 decades");
  };
  if (e.name == "decay_fits") {
    range_check();
  } else if (e.name == "w1p_estimates_check") {
    range_check();
    if (!(require_number(p, "p", path) > n)) config_error(path + ".p", "need p > n");
    if (!(require_number(p, "A", path) > 0.0)) config_error(path + ".A", "need A > 0");
  } else if (e.name == "heat_kernel_check") {
    if (get_int(p, "samples", path, 5) < 1) config_error(path + ".samples", "need >= 1");
  } else if (e.name == "beta_weak_estimate") {
    beta_check(require_number(p, "beta", path));
    get_ladder(p, path);
  } else if (e.name == "lower_bound_decay_fit") {
    const double beta = require_number(p, "beta", path);
    beta_check(beta);
    const double gamma = require_number(p, "gamma", path);
    if (!(gamma > 1.0 / (1.0 - 2.0 * beta))) config_error(path + ".gamma", "need gamma > 1/(1 - 2 beta)");
  } else if (e.name == "iteration_replay") {
    const double beta = require_number(p, "beta", path);
    beta_check(beta);
    const double gamma = get_number(p, "gamma", path, 3.0);
    if (!(gamma > 1.0 / (1.0 - 2.0 * beta))) config_error(path + ".gamma", "need gamma > 1/(1 - 2 beta)");
  } else if (e.name == "davies_check") {
    if (get_int(p, "pairs", path, 10) < 1) config_error(path + ".pairs", "need >= 1");
    const double r1 = get_number(p, "U1_radius", path, 0.1);
    const double a = get_number(p, "U2_inner", path, 0.3), b = get_number(p, "U2_outer", path, 0.5);
    if (!(r1 > 0.0 && a > r1 && b > a)) config_error(path + ".U1_radius/U2_inner/U2_outer", "need 0 < U1_radius < U2_inner < U2_outer");
  } else if (e.name == "theorem45_pipeline") {
    if (cfg.generator == "conformal") config_error(path, "theorem45_pipeline needs metric.generator \"cone\" or \"flat\"");
    Theorem45Params tp;
    tp.grid = cfg.grid;
    tp.cone = theorem45_cone(cfg, n);
    tp.beta = require_number(p, "beta", path);
    beta_check(tp.beta);
    tp.gamma = require_number(p, "gamma", path);
    tp.kappa = get_number(p, "kappa", path, 0.0);
    tp.eta = get_number(p, "eta", path, tp.eta);
    tp.T = get_number(p, "T", path, tp.T);
    tp.chi_inner = get_number(p, "chi_inner", path, tp.chi_inner);
    tp.chi_outer = get_number(p, "chi_outer", path, tp.chi_outer);
    tp.C = get_number(p, "C", path, tp.C);
    tp.C_ladder = get_ladder(p, path);
    tp.snapshots = get_int(p, "snapshots", path, tp.snapshots);
    tp.per_octave = get_int(p, "per_octave", path, tp.per_octave);
    tp.davies_pairs = get_int(p, "davies_pairs", path, tp.davies_pairs);
    try {
      validate_theorem45(tp);
    } catch (const Error& err) {
      config_error(path, err.what());
    }
  } else {
    config_error(path + ".name", "unknown experiment \"" + e.name + "\"");
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Shared read-only inputs for one run.
struct RunContext {
  const ExperimentConfig* cfg = nullptr;
  const FlowTrajectory* traj = nullptr;
  std::size_t centre = 0;
};

std::size_t random_active_node(const GridSpec& grid, const Vec& c, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    Vec x = c;
    for (int k = 0; k < grid.dim; ++k) x[k] += u(rng);
    const std::size_t node = grid.nearest_node(x);
    if (!grid.in_collar(node)) return node;
  }
}

void run_decay(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const double lo = get_number(p, "t_lo", "", 0.0), hi = get_number(p, "t_hi", "", ctx.cfg->t_end);
  out.fits = decay_fits(*ctx.traj, lo, hi, get_number(p, "tolerance", "", 0.15));
  log << "Decay-exponent fits of the flow diagnostics over t in [" << lo << ", " << hi << "].\n";
}

void run_w1p(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const double lo = get_number(p, "t_lo", "", 0.0), hi = get_number(p, "t_hi", "", ctx.cfg->t_end);
  const double pp = p["p"].get<double>(), A = p["A"].get<double>();
  const double A0 = local_gradient_integral(ctx.traj->initial(), pp);
  const W1pCheck w = w1p_estimates_check(*ctx.traj, pp, A, lo, hi, get_number(p, "tolerance", "", 0.15));
  out.fits = {w.integral, w.gradient, w.hessian};
  out.checks.push_back({"initial_local_integral_over_A", A0 / A, 1.0, A0 <= A});
  out.checks.push_back({"sup_t_local_integral_over_A", w.integral_ratio, 0.0, true});
  log << "W^{1,p} estimates with p = " << pp << ", A = " << A << ".\n";
}

void run_kernel(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const FlowTrajectory& traj = *ctx.traj;
  const GridSpec& grid = traj.grid();
  std::mt19937_64 rng(ctx.cfg->seed);
  const int samples = get_int(p, "samples", "", 5);
  const double tol = get_number(p, "mass_tolerance", "", 1e-2);
  const double reach = 0.5 * (grid.half_width - grid.collar_width);
  const double T = traj.final_time();
  for (int k = 0; k < samples; ++k) {
    const std::size_t y = random_active_node(grid, grid.position(ctx.centre), reach, rng);
    const double s = std::uniform_real_distribution<double>(0.0, 0.5 * T)(rng);
    const double t = std::uniform_real_distribution<double>(s + 0.25 * T, T)(rng);
    const KernelField K = heat_kernel(traj, y, s, t);
    const double tau = t - s;
    std::vector<double> radii;
    for (int r = 1; r <= 8; ++r) radii.push_back(0.75 * r * std::sqrt(tau));
    const TailFit fit = fit_gaussian_tail(K, traj.metric_at(t), grid.position(y), radii);
    const std::string tag = "sample" + std::to_string(k);
    out.checks.push_back({tag + "_mass", K.mass, tol, std::abs(K.mass - 1.0) <= tol});
    out.checks.push_back({tag + "_tail_D", fit.D, 4.0, fit.D > 4.0 && fit.holds});
    out.checks.push_back({tag + "_tail_C2", fit.C2, 0.0, true});
    log << tag << ": y = " << y << ", s = " << s << ", t = " << t << ", mass = " << K.mass << ", D = " << fit.D
        << ", C2 = " << fit.C2 << "\n";
  }
}

void run_beta_weak(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const double beta = p["beta"].get<double>();
  const double kappa = get_number(p, "kappa", "", 0.0);
  const double tol = get_number(p, "tolerance", "", 0.02);
  const BetaWeakResult r = beta_weak_estimate(*ctx.traj, ctx.centre, beta, get_ladder(p, ""),
                                              get_number(p, "lambda", "", 0.5));
  out.checks.push_back({"estimate", r.value, kappa - tol, r.value >= kappa - tol});
  out.checks.push_back({"raw", r.raw, kappa - tol, true});
  out.checks.push_back({"swapped_raw", r.swapped_raw, kappa - tol, true});
  out.checks.push_back({"swapped_extrapolated", r.swapped_extrapolated, kappa - tol, true});
  bool monotone = true;
  for (std::size_t i = 1; i < r.per_c.size(); ++i) monotone = monotone && r.per_c[i].raw <= r.per_c[i - 1].raw;
  out.checks.push_back({"raw_monotone_in_C", monotone ? 1.0 : 0.0, 1.0, monotone});
  for (const auto& pc : r.per_c)
    log << "C = " << pc.C << ": raw " << pc.raw << ", extrapolated " << pc.extrapolated << "\n";
}

void run_lower_bound(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const FitReport r = lower_bound_decay_fit(*ctx.traj, ctx.centre, get_number(p, "kappa", "", 0.0),
                                            p["beta"].get<double>(), p["gamma"].get<double>(),
                                            get_number(p, "min_lambda", "", 0.0));
  out.fits.push_back(r);
  log << "Deficit fit at the centre node: " << (r.note.empty() ? "fitted" : r.note) << ".\n";
}

void run_replay(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const FlowTrajectory& traj = *ctx.traj;
  const double beta = p["beta"].get<double>();
  const double gamma = get_number(p, "gamma", "", 3.0);
  const double t = get_number(p, "t", "", traj.final_time());
  // Schedule arithmetic.
  const ShrinkingBallSchedule s = make_schedule(ctx.centre, beta, t, 200);
  double worst = 0.0;
  for (int k = 1; k <= s.depth; ++k) {
    const double closed = s.limit() * (1.0 - std::pow(2.0, -beta * k));
    worst = std::max(worst, std::abs(s.accumulated(k) - closed) / s.limit());
  }
  out.checks.push_back({"partial_sums_vs_closed_form", worst, 1e-10, worst <= 1e-10});
  const double tail = std::abs(s.accumulated(s.depth) - s.limit()) / s.limit();
  out.checks.push_back({"partial_sum_depth200_vs_limit", tail, 1e-10, tail <= 1e-10});
  // Kernel tail constants from one kernel out of the base point.
  const double s0 = traj.find(t / 4.0) >= 0 ? t / 4.0 : 0.0;
  const KernelField K = heat_kernel(traj, ctx.centre, s0, t);
  std::vector<double> radii;
  for (int r = 1; r <= 8; ++r) radii.push_back(0.75 * r * std::sqrt(t - s0));
  const TailFit fit = fit_gaussian_tail(K, traj.metric_at(t), traj.grid().position(ctx.centre), radii);
  const FlowConstants fc = flow_constants(traj);
  const TailConstant c3 = tail_constant(beta, gamma, fit.D);
  for (int k = 0; k < 5; ++k) {
    const double tk = std::pow(10.0, -2.0 - 0.5 * k);
    const double series = tail_series(tk, beta, fit.D);
    const double bound = c3.sharp * std::pow(tk, c3.lambda);
    out.checks.push_back({"tail_series_t" + std::to_string(k), series, bound, series <= bound});
    out.checks.push_back({"tail_series_unit_constant_t" + std::to_string(k), series, c3.unit * std::pow(tk, c3.lambda),
                          true});
  }
  const ReplayResult rr = iteration_replay(traj, ctx.centre, beta, t, fc.C1 * fit.C2, fit.D);
  for (const auto& st : rr.steps) {
    out.checks.push_back({"replay_k" + std::to_string(st.k), rr.R_xt, st.lower, st.inequality});
    out.checks.push_back({"replay_k" + std::to_string(st.k) + "_in_ball", st.accumulated, s.limit(),
                          st.in_ball && st.accumulated <= s.limit() * (1.0 + 1e-10)});
  }
  out.checks.push_back({"replay_depth", double(rr.steps.size()), 1.0, !rr.steps.empty()});
  log << "lambda = " << c3.lambda << ", D = " << fit.D << ", C2 = " << fit.C2 << ", C1 = " << fc.C1
      << ", C3 (sharp) = " << c3.sharp << ", C3 (unit) = " << c3.unit << "; replay stopped: " << rr.stop_reason << "\n";
}

void run_davies(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const FlowTrajectory& traj = *ctx.traj;
  const Vec c = traj.grid().position(ctx.centre);
  const Region U1{c, 0.0, get_number(p, "U1_radius", "", 0.1)};
  const Region U2{c, get_number(p, "U2_inner", "", 0.3), get_number(p, "U2_outer", "", 0.5)};
  const FlowConstants fc = flow_constants(traj);
  const std::vector<double> times = traj.times();
  std::mt19937_64 rng(ctx.cfg->seed);
  std::uniform_int_distribution<std::size_t> pick(0, times.size() - 1);
  const int pairs = get_int(p, "pairs", "", 10);
  for (int k = 0; k < pairs; ++k) {
    std::size_t i = pick(rng), j = pick(rng);
    while (i == j) j = pick(rng);
    if (i > j) std::swap(i, j);
    const DaviesResult d = davies_check(traj, U1, U2, times[i], times[j], fc);
    const std::string tag = "pair" + std::to_string(k);
    out.checks.push_back({tag, d.lhs, d.rhs, d.holds});
    out.checks.push_back({tag + "_quarter_exponent", d.lhs, d.rhs_standard, true});
    log << tag << ": t = " << d.t << ", T = " << d.T << ", lhs = " << d.lhs << ", bound = " << d.rhs
        << ", bound with 4(T-t) = " << d.rhs_standard << "\n";
  }
}

void run_theorem45(const RunContext& ctx, const json& p, ExperimentOutcome& out, std::ostream& log) {
  const ExperimentConfig& cfg = *ctx.cfg;
  Theorem45Params tp;
  tp.grid = cfg.grid;
  tp.cone = theorem45_cone(cfg, cfg.grid.dim);
  tp.beta = p["beta"].get<double>();
  tp.gamma = p["gamma"].get<double>();
  tp.kappa = get_number(p, "kappa", "", 0.0);
  tp.eta = get_number(p, "eta", "", tp.eta);
  tp.T = get_number(p, "T", "", tp.T);
  tp.chi_inner = get_number(p, "chi_inner", "", tp.chi_inner);
  tp.chi_outer = get_number(p, "chi_outer", "", tp.chi_outer);
  tp.C = get_number(p, "C", "", tp.C);
  tp.C_ladder = get_ladder(p, "");
  tp.snapshots = get_int(p, "snapshots", "", tp.snapshots);
  tp.per_octave = get_int(p, "per_octave", "", tp.per_octave);
  tp.davies_pairs = get_int(p, "davies_pairs", "", tp.davies_pairs);
  tp.seed = cfg.seed;
  const Theorem45Result r = theorem45_pipeline(tp);
  out.checks.push_back({"battery", r.battery_ok ? 1.0 : 0.0, 1.0, r.battery_ok});
  out.checks.push_back({"eta_admissible", tp.eta, r.eta_threshold, r.eta_admissible});
  out.checks.push_back({"energy_nonnegative", r.energy_nonnegative ? 1.0 : 0.0, 1.0, r.energy_nonnegative});
  out.checks.push_back({"energy_inequality", r.energy_inequality ? 1.0 : 0.0, 1.0, r.energy_inequality});
  out.checks.push_back({"limit_E", r.E_small, 5.0 * r.c3 * r.eps, r.limit_ok});
  out.checks.push_back({"gronwall", r.gronwall_ok ? 1.0 : 0.0, 1.0, r.gronwall_ok});
  out.checks.push_back({"davies", r.davies_ok ? 1.0 : 0.0, 1.0, r.davies_ok});
  out.checks.push_back({"davies_in_box", r.davies_domain_ok ? 1.0 : 0.0, 1.0, true});
  out.checks.push_back({"beta_weak", r.beta_weak.value, tp.kappa - 0.02, r.beta_weak.value >= tp.kappa - 0.02});
  out.fits.push_back(r.deficit);
  log << "eps = " << r.eps << ", c3 = " << r.c3 << ", c4 = " << r.c4 << ", eta threshold = " << r.eta_threshold << "\n";
  log << "t,E,f_sup,annulus_mass\n";
  for (std::size_t i = 0; i < r.energy.times.size(); ++i)
    log << fmt(r.energy.times[i]) << ',' << fmt(r.energy.energy[i]) << ',' << fmt(r.energy.f_sup[i]) << ','
        << fmt(r.energy.annulus_mass[i]) << "\n";
}

using Runner = std::function<void(const RunContext&, const json&, ExperimentOutcome&, std::ostream&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"decay_fits", run_decay},         {"w1p_estimates_check", run_w1p},     {"heat_kernel_check", run_kernel},
      {"beta_weak_estimate", run_beta_weak}, {"lower_bound_decay_fit", run_lower_bound},
      {"iteration_replay", run_replay},  {"davies_check", run_davies},      {"theorem45_pipeline", run_theorem45}};
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("config: invalid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) config_error("config", "top level must be an object");
  ExperimentConfig cfg;

  if (!j.contains("grid") || !j["grid"].is_object()) config_error("grid", "missing object");
  const json& g = j["grid"];
  try {
    cfg.grid = GridSpec::make(get_int(g, "dim", "grid", 2), require_number(g, "half_width", "grid"),
                              get_int(g, "points", "grid", 129), require_number(g, "collar_width", "grid"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    config_error("grid", e.what());
  }

  if (j.contains("metric")) {
    const json& m = j["metric"];
    if (!m.is_object()) config_error("metric", "expected an object");
    if (m.contains("generator")) {
      if (!m["generator"].is_string()) config_error("metric.generator", "expected a string");
      cfg.generator = m["generator"].get<std::string>();
    }
    if (m.contains("params")) {
      if (!m["params"].is_object()) config_error("metric.params", "expected an object");
      cfg.metric_params = m["params"];
    }
  }
  if (cfg.generator != "flat" && cfg.generator != "cone" && cfg.generator != "conformal")
    config_error("metric.generator", "unknown generator \"" + cfg.generator + "\" (flat, cone, conformal)");
  if (j.contains("flow")) {
    const json& f = j["flow"];
    if (!f.is_object()) config_error("flow", "expected an object");
    cfg.t_end = get_number(f, "t_end", "flow", cfg.t_end);
    cfg.sigma_cfl = get_number(f, "sigma_cfl", "flow", cfg.sigma_cfl);
    cfg.snapshots = get_int(f, "snapshots", "flow", cfg.snapshots);
    cfg.per_octave = get_int(f, "per_octave", "flow", cfg.per_octave);
  }
  if (!(cfg.t_end > 0.0)) config_error("flow.t_end", "must be positive");
  if (!(cfg.sigma_cfl > 0.0) || cfg.sigma_cfl > stability_limit(cfg.grid.dim))
    config_error("flow.sigma_cfl", "must lie in (0, 1/(2n)]");
  if (cfg.snapshots < 1) config_error("flow.snapshots", "must be >= 1");
  if (cfg.per_octave < 1) config_error("flow.per_octave", "must be >= 1");

  if (!j.contains("experiments") || !j["experiments"].is_array()) config_error("experiments", "missing array");
  for (std::size_t i = 0; i < j["experiments"].size(); ++i) {
    const json& e = j["experiments"][i];
    const std::string path = "experiments[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) config_error(path + ".name", "missing string");
    ExperimentSpec spec;
    spec.name = e["name"].get<std::string>();
    if (e.contains("params")) {
      if (!e["params"].is_object()) config_error(path + ".params", "expected an object");
      spec.params = e["params"];
    }
    validate_experiment(cfg, spec, path + ".params");
    cfg.experiments.push_back(std::move(spec));
  }

  // The generated datum is skipped only when every experiment builds its own.
  const bool shared_flow = cfg.experiments.empty() || std::any_of(cfg.experiments.begin(), cfg.experiments.end(),
                                       [](const ExperimentSpec& e) { return e.name != "theorem45_pipeline"; });
  if (shared_flow) {
    try {
      const MetricField g0 = generate_metric(cfg);
      if (!(c0_distance(g0, MetricField::flat(cfg.grid)).value < 1.0))
        config_error("metric.params", "initial metric must satisfy ||g0 - delta||_C0 < 1");
      if (g0.collar_deviation() > 0.0) config_error("metric.params", "initial metric is not flat on the boundary collar");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Config) throw;
      config_error("metric.params", e.what());
    }
  }

  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
      config_error("output_dir", "expected a non-empty string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_error("seed", "expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  cfg.workers = get_int(j, "workers", "config", 0);
  if (cfg.workers < 0) config_error("workers", "must be >= 0");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest run_experiments(const ExperimentConfig& cfg, const std::string& config_text,
                            const std::string& output_root) {
  namespace fs = std::filesystem;
  std::string root = output_root;
  if (root.empty())
    if (const char* env = std::getenv("RDTF_OUTPUT_ROOT")) root = env;
  fs::path dir = cfg.output_dir;
  if (!root.empty() && dir.is_relative()) dir = fs::path(root) / dir;
  fs::create_directories(dir);

  RunManifest manifest;
  manifest.config_hash = content_hash(config_text);
  manifest.version = RDTF_VERSION_STRING;

  const bool needs_flow = std::any_of(cfg.experiments.begin(), cfg.experiments.end(),
                                      [](const ExperimentSpec& e) { return e.name != "theorem45_pipeline"; });
  FlowTrajectory traj;
  if (needs_flow) {
    FlowOptions opts;
    opts.sigma = cfg.sigma_cfl;
    traj = run_flow(generate_metric(cfg), cfg.t_end, geometric_snapshots(cfg.t_end, cfg.snapshots, cfg.per_octave), opts);
  }
  RunContext ctx{&cfg, &traj, cfg.grid.nearest_node(get_point(cfg.metric_params, "center", "metric.params", cfg.grid.dim))};

  std::vector<ExperimentOutcome> outcomes(cfg.experiments.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.experiments.size(); i = next++) {
      const ExperimentSpec& spec = cfg.experiments[i];
      ExperimentOutcome& out = outcomes[i];
      out.name = spec.name;
      std::ostringstream log;
      const auto start = std::chrono::steady_clock::now();
      try {
        runners().at(spec.name)(ctx, spec.params, out, log);
        bool ok = true;
        for (const auto& f : out.fits) ok = ok && f.pass;
        for (const auto& c : out.checks) ok = ok && c.pass;
        out.status = ok ? "pass" : "fail";
      } catch (const std::exception& e) {
        out.status = "error";
        out.message = spec.name + ": " + e.what();
        log << "error: " << out.message << "\n";
      }
      out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      char name[96];
      std::snprintf(name, sizeof name, "%02zu_%s.txt", i, spec.name.c_str());
      const fs::path summary = dir / name;
      std::ofstream os(summary);
      os << "experiment: " << spec.name << "\nstatus: " << out.status << "\n";
      for (const auto& f : out.fits)
        os << "fit " << f.quantity << ": slope " << fmt(f.fitted) << " +- " << fmt(f.std_error) << " (predicted "
           << fmt(f.predicted) << ", tolerance " << fmt(f.tolerance) << ", " << f.samples << " samples over "
           << fmt(f.decades()) << " decades) " << (f.pass ? "pass" : "fail") << (f.note.empty() ? "" : " [" + f.note + "]")
           << "\n";
      for (const auto& c : out.checks)
        os << "check " << c.quantity << ": " << fmt(c.value) << " vs " << fmt(c.bound) << " " << (c.pass ? "pass" : "fail")
           << "\n";
      os << log.str();
      out.files.push_back(summary.string());
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t pool =
      std::min<std::size_t>(cfg.workers > 0 ? std::size_t(cfg.workers) : hw, std::max<std::size_t>(1, outcomes.size()));
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < pool; ++k) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  const fs::path fits_path = dir / "fits.csv";
  const fs::path checks_path = dir / "checks.csv";
  {
    std::ofstream fits(fits_path, std::ios::binary);
    fits << "experiment,quantity,predicted,fitted,std_error,constant,t_min,t_max,samples,tolerance,pass,note\n";
    std::ofstream checks(checks_path, std::ios::binary);
    checks << "experiment,quantity,value,bound,pass\n";
    for (const auto& o : outcomes) {
      for (const auto& f : o.fits)
        fits << o.name << ',' << csv_field(f.quantity) << ',' << fmt(f.predicted) << ',' << fmt(f.fitted) << ','
             << fmt(f.std_error) << ',' << fmt(f.constant) << ',' << fmt(f.t_min) << ',' << fmt(f.t_max) << ','
             << f.samples << ',' << fmt(f.tolerance) << ',' << (f.pass ? 1 : 0) << ',' << csv_field(f.note) << '\n';
      for (const auto& c : o.checks)
        checks << o.name << ',' << csv_field(c.quantity) << ',' << fmt(c.value) << ',' << fmt(c.bound) << ','
               << (c.pass ? 1 : 0) << '\n';
    }
  }

  manifest.passed = true;
  json jm;
  jm["config_hash"] = manifest.config_hash;
  jm["version"] = manifest.version;
  jm["experiments"] = json::array();
  for (auto& o : outcomes) {
    manifest.passed = manifest.passed && o.status == "pass";
    jm["experiments"].push_back(
        {{"name", o.name}, {"status", o.status}, {"message", o.message}, {"wall_seconds", o.wall_seconds}, {"files", o.files}});
    for (const auto& f : o.files) manifest.files.push_back(f);
  }
  manifest.files.push_back(fits_path.string());
  manifest.files.push_back(checks_path.string());
  const fs::path manifest_path = dir / "manifest.json";
  manifest.files.push_back(manifest_path.string());
  jm["files"] = manifest.files;
  jm["passed"] = manifest.passed;
  std::ofstream(manifest_path) << jm.dump(2) << '\n';
  manifest.experiments = std::move(outcomes);
  return manifest;
}

std::string list_experiments() {
  // Anchors name the statement each experiment reproduces.
  struct Row {
    const char* name;
    const char* anchor;
    const char* params;
  };
  static const Row rows[] = {
      {"decay_fits", "Theorem 2.5, Eqs. (dgt), (lower), (Rmm), (df)", "t_lo, t_hi [tolerance]"},
      {"w1p_estimates_check", "Theorem 4.7", "p, A, t_lo, t_hi [tolerance]"},
      {"heat_kernel_check", "Eqs. (int), (kernel)", "[samples, mass_tolerance]"},
      {"beta_weak_estimate", "Definition 2.3", "beta [C_ladder, kappa, lambda, tolerance]"},
      {"lower_bound_decay_fit", "Theorem 3.1", "beta, gamma [kappa, min_lambda]"},
      {"iteration_replay", "Theorem 3.1 proof, Eqs. (ak), (final)", "beta [gamma, t]"},
      {"davies_check", "Eq. (hkd)", "[pairs, U1_radius, U2_inner, U2_outer]"},
      {"theorem45_pipeline", "Theorem 4.5", "beta, gamma [kappa, eta, T, chi_inner, chi_outer, C, C_ladder, snapshots]"},
  };
  std::ostringstream os;
  for (const Row& r : rows) os << r.name << " → " << r.anchor << "    params: " << r.params << "\n";
  return os.str();
}

}  // namespace rdtf
