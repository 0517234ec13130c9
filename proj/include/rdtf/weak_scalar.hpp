#pragma once

#include <string>
#include <vector>

#include "rdtf/distance.hpp"
#include "rdtf/grid.hpp"
#include "rdtf/trajectory.hpp"

namespace rdtf {

enum class CutoffKind { ChiSpace, PhiRadial };

/// Quintic smoothstep cutoff: 1 for r ≤ r_in, 0 for r ≥ r_out, C² in between.
/// ChiSpace is evaluated at the Euclidean distance to `centre`; PhiRadial is a
/// profile of one nonnegative variable (centre unused).
struct CutoffProfile {
  CutoffKind kind = CutoffKind::PhiRadial;
  Vec centre{};
  double r_in = 0.5;
  double r_out = 1.0;
  double c4 = 0.0;  // max(sup|φ'|, sup over {φ>0} of -φ''/φ), padded by 1e-6 relative

  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;
  double at(const Vec& x, int dim) const;
  ScalarField field(const GridSpec& grid) const;
};

CutoffProfile make_cutoff(CutoffKind kind, double r_in, double r_out, const Vec& centre = {});

/// g0 = χ g_local + (1 - χ) δ. χ must vanish on the boundary collar.
MetricField glue_to_flat(const MetricField& g_local, const CutoffProfile& chi);

enum class ConeDirection { Identity, E11 };

struct ConeParams {
  Vec centre{};
  double sigma = 0.6;
  double amplitude = 0.05;
  double p = 4.0;
  ConeDirection direction = ConeDirection::Identity;
  double bump_inner = 0.5;   // η ≡ 1 inside
  double bump_outer = 1.0;   // η ≡ 0 outside; bump_outer = 0 disables η
};

/// g = δ + a η(x) |x - x_c|^σ A. Requires p > n, 1 - n/p < σ < 1, |a| < 0.5 and
/// a bump radius ≤ 1 (so the perturbation stays below 1/2 in C⁰).
MetricField make_w1p_cone(const GridSpec& grid, const ConeParams& params);
void validate_cone(int dim, const ConeParams& params);

struct DistributionalScalarTerms {
  VectorField V;
  ScalarField F;
  ScalarField volume_ratio;
  ScalarField integrand;  // -V·∂(u ρ) + F u ρ per node; value = Σ integrand h^n
  double value = 0.0;
};

/// ⟪R_g, u⟫ = Σ h^n [ -V·∂(u ρ) + F u ρ ] with ρ = √det g, first derivatives
/// of g only. u must vanish on the boundary collar.
DistributionalScalarTerms distributional_scalar(const MetricField& g, const ScalarField& u);

/// ⟪R_g, u⟫ - κ ∫ u dμ_g; nonnegative when R ≥ κ holds weakly against u.
double weak_lower_bound_margin(const MetricField& g, const ScalarField& u, double kappa);

/// |⟪R_{g0}, u⟫ - ⟪R_{g_local}, u⟫| / ‖g_local - δ‖_{C⁰}, g0 = glue_to_flat(g_local, χ).
double gluing_error_check(const MetricField& g_local, const CutoffProfile& chi, const ScalarField& u);

/// max(κ - R, 0) pointwise.
ScalarField negative_part(const ScalarField& R, double kappa);

/// ψ = φ(t^γ d).
ScalarField distance_cutoff(const DistanceField& d, const CutoffProfile& phi, double t, double gamma);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;         // ∫ f φ_t ψ_t dμ_t
  std::vector<double> f_sup;          // sup (R - κ)_-
  std::vector<double> annulus_mass;   // ∫ over {0 < ψ_t < 1} of φ_t dμ_t
  double kappa = 0.0, beta = 0.0, gamma = 0.0, T = 0.0;
};

/// E(t) at each stored slice time in `times`. phi[i] and psi[i] live at times[i].
EnergyTrace energy_functional(const FlowTrajectory& traj, const std::vector<double>& times,
                              const std::vector<ScalarField>& phi, const std::vector<ScalarField>& psi,
                              double kappa);

}  // namespace rdtf
