#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdtf/fit.hpp"
#include "rdtf/grid.hpp"
#include "rdtf/trajectory.hpp"
#include "rdtf/weak_scalar.hpp"

namespace rdtf {

/// Smallest stored time treated as resolved: one full explicit flow step.
/// Earlier slices are partial-step interpolants of the raw initial datum.
double resolved_time_floor(const FlowTrajectory& traj);

/// r_i = (t/2^i)^β and ρ_k = Σ_{i=1}^k r_i around a base node.
struct ShrinkingBallSchedule {
  std::size_t x = 0;
  double beta = 0.25;
  double t = 0.0;
  int depth = 0;

  double radius(int i) const;
  double accumulated(int k) const;
  /// ρ_∞ = t^β / (2^β - 1).
  double limit() const;
};

ShrinkingBallSchedule make_schedule(std::size_t x, double beta, double t, int depth);
void validate_beta(double beta);

/// λ = -1 - (2β - 1) γ.
double lambda_exponent(double beta, double gamma);

/// Σ_{i=1}^{depth} (2^i/t) exp(-r_i² / (D t/2^i)).
double tail_series(double t, double beta, double D, int depth = 200);

/// Constants C₃ with tail_series(t) ≤ C₃ t^λ for every t ≤ 1. `sharp` uses
/// e^{-v} ≤ (γ/e)^γ v^{-γ}; `unit` uses e^{-v} ≤ v^{-γ}, which is only valid
/// for γ ≤ e.
struct TailConstant {
  double lambda = 0.0;
  double sharp = 0.0;
  double unit = 0.0;
};
TailConstant tail_constant(double beta, double gamma, double D);

/// Flow constants read off the slice diagnostics (sup over stored slices):
/// C₁ = t sup|R|, c₃ε = t sup|Rm|, c₆ε = t^{3/2} sup|∂R| and c₂ε with
/// (1+c₂ε)^{-1} δ ≤ g(t) ≤ (1+c₂ε) δ.
struct FlowConstants {
  double C1 = 0.0;
  double c2eps = 0.0;
  double c3eps = 0.0;
  double c6eps = 0.0;
};
FlowConstants flow_constants(const FlowTrajectory& traj);

struct ReplayStep {
  int k = 0;
  std::size_t node = 0;
  double time = 0.0;
  double radius = 0.0;
  double accumulated = 0.0;
  double a_k = 0.0;
  double series = 0.0;      // Σ_{i≤k} (2^i/t) exp(-r_i²/(D t/2^i))
  double lower = 0.0;       // a_k - 2 C₁C₂ series
  bool inequality = false;  // R(x, t) ≥ lower
  bool in_ball = false;     // |x_k - x| ≤ ρ_k
};

struct ReplayResult {
  double R_xt = 0.0;
  std::vector<ReplayStep> steps;
  bool all_hold = false;
  std::string stop_reason;
};

/// Replays the argmin chain x_k ∈ B(x_{k-1}, r_k) at times t/2^k. Every
/// t/2^k must be a stored slice; the chain stops when r_k < 2h or the slice
/// is missing.
ReplayResult iteration_replay(const FlowTrajectory& traj, std::size_t x, double beta, double t, double C1C2,
                              double D);

struct BetaWeakPerC {
  double C = 0.0;
  double raw = 0.0;            // min over the smallest resolvable decade
  double extrapolated = 0.0;   // intercept of a fit in t^λ over that decade
  std::vector<double> minima;  // ball infimum at each time in `times`
};

struct BetaWeakResult {
  double value = 0.0;          // inf over C of the extrapolated values
  double raw = 0.0;            // inf over C of the raw values
  double swapped_raw = 0.0;    // liminf over t of the inf over C
  double swapped_extrapolated = 0.0;
  double lambda = 0.5;
  std::vector<double> times;
  std::vector<BetaWeakPerC> per_c;
};

inline const std::vector<double> kDefaultCLadder = {0.5, 1.0, 2.0, 4.0, 8.0};

/// Ball = nodes within Euclidean distance C t^β of x. The time set is every
/// stored slice in the smallest decade where the smallest ball has radius
/// ≥ h and t ≥ resolved_time_floor, shared by all C, so raw values are
/// non-increasing in C.
BetaWeakResult beta_weak_estimate(const FlowTrajectory& traj, std::size_t x, double beta,
                                  const std::vector<double>& C_ladder = kDefaultCLadder, double lambda = 0.5);

/// Deficit max(κ - R(x, t), 0) over resolved stored slices, fitted against t.
/// A deficit that never exceeds `slack` is reported as a pass ("bound slack").
FitReport lower_bound_decay_fit(const FlowTrajectory& traj, std::size_t x, double kappa, double beta, double gamma,
                                double min_lambda = 0.0, double slack = 1e-12);

struct Region {
  Vec centre{};
  double r_in = 0.0;   // 0 → ball
  double r_out = 0.0;
  bool contains(const Vec& p, int dim) const;
  /// Euclidean gap between two regions sharing a centre, or between balls.
  static double distance(const Region& a, const Region& b, int dim);
};

struct DaviesResult {
  double t = 0.0, T = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;           // exponent d²/(2(1+c₂ε)²(T-t))
  double rhs_standard = 0.0;  // exponent d²/(4(1+c₂ε)²(T-t))
  double distance = 0.0;
  double vol_T_U1 = 0.0, vol_t_U2 = 0.0;
  double vol_bound_plain = 0.0;  // (1+c₂ε)^{n/2} r^n
  double vol_bound_ball = 0.0;   // ω_n (1+c₂ε)^{n/2} r^n
  bool holds = false;
  bool holds_standard = false;
  bool vol_plain_ok = false;
  bool vol_ball_ok = false;
};

/// ∫_{U2} ∫_{U1} Φ(y, T; x, t) dμ_T(y) dμ_t(x) via one conjugate solve from
/// the indicator of U1, compared with the double-integral bound.
DaviesResult davies_check(const FlowTrajectory& traj, const Region& U1, const Region& U2, double t, double T,
                          const FlowConstants& constants);

/// sup|∂g|, sup|∂²g|, sup|R|, sup|∂R| against t over [t_lo, t_hi] with the
/// smooth-data exponents -1/2, -1, -1, -3/2.
std::vector<FitReport> decay_fits(const FlowTrajectory& traj, double t_lo, double t_hi, double tolerance = 0.15);

struct W1pCheck {
  double A = 0.0;
  FitReport integral;  // sup_x ∫_{B(x,1)} |∂g|^p, exponent 0
  FitReport gradient;  // sup|∂g|, exponent -n/(2p)
  FitReport hessian;   // sup|∂²g|, exponent -n/(4p) - 3/4
  double integral_ratio = 0.0;  // sup_t of the integral divided by A
};

/// sup over base points x of ∫_{B(x,1)} |∂g|^p dx.
double local_gradient_integral(const MetricField& g, double p);

W1pCheck w1p_estimates_check(const FlowTrajectory& traj, double p, double A, double t_lo, double t_hi,
                             double tolerance = 0.15);

struct Theorem45Params {
  GridSpec grid;
  ConeParams cone;            // the local datum (bump disabled: R > 0 off the tip)
  double chi_inner = 1.7;     // χ ≡ 1 inside, glued to δ outside chi_outer
  double chi_outer = 2.1;
  double kappa = 0.0;
  double beta = 0.25;
  double gamma = 3.0;
  double eta = 2.0;
  double T = 1e-2;
  int snapshots = 20;
  int per_octave = 2;
  double C = 1.0;             // U1 = B(x0, C T^β), also the support of φ_T
  std::vector<double> C_ladder = kDefaultCLadder;
  int davies_pairs = 10;
  Region davies_domain_U2{{}, 0.9, 1.5};  // extra annulus inside the box, diagnostic only
  std::uint64_t seed = 1;
  double battery_tolerance = 1e-9;
};

struct Theorem45Result {
  double eps = 0.0;
  std::vector<double> battery_margins;
  bool battery_ok = false;
  double c3 = 0.0;            // gluing constant against u = φ at the smallest time
  double c4 = 0.0;
  double eta_threshold = 0.0;
  bool eta_admissible = false;
  EnergyTrace energy;
  bool energy_nonnegative = false;
  std::vector<double> dEdt, dEdt_bound;
  bool energy_inequality = false;
  double E_small = 0.0;       // E at the smallest stored time
  bool limit_ok = false;      // E_small ≤ 5 c₃ ε
  bool gronwall_ok = false;
  FlowConstants constants;
  std::vector<DaviesResult> davies;         // U2 = the proof's annulus at scale t^{-γ}
  bool davies_ok = false;
  std::vector<DaviesResult> davies_domain;  // U2 = davies_domain_U2, same (t, T) pairs
  bool davies_domain_ok = false;
  bool davies_domain_standard_ok = false;
  BetaWeakResult beta_weak;
  FitReport deficit;  // (κ - R)_+ at the cone centre, informational
  bool pass = false;
};

void validate_theorem45(const Theorem45Params& p);
Theorem45Result theorem45_pipeline(const Theorem45Params& p);

}  // namespace rdtf
