#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rdtf/curvature.hpp"
#include "rdtf/field_ops.hpp"
#include "rdtf/flow.hpp"
#include "rdtf/scalar_transport.hpp"
#include "rdtf/weak_scalar.hpp"

using namespace rdtf;

namespace {

const FlowTrajectory& flat_trajectory() {
  static const FlowTrajectory tr = run_flow(MetricField::flat(GridSpec::make(2, 1.0, 129, 0.25)), 2e-3,
                                            geometric_snapshots(2e-3, 4, 1));
  return tr;
}

const FlowTrajectory& curved_trajectory() {
  static const FlowTrajectory tr = [] {
    ConeParams cp;
    cp.amplitude = 0.05;
    cp.bump_inner = 0.3;
    cp.bump_outer = 0.6;
    cp.direction = ConeDirection::E11;
    return run_flow(make_w1p_cone(GridSpec::make(2, 1.0, 65, 0.25), cp), 2e-3, geometric_snapshots(2e-3, 6, 1));
  }();
  return tr;
}

double weighted_pairing(const ScalarField& a, const ScalarField& b, const MetricField& g) {
  const ScalarField rho = volume_density(g);
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n] * rho[n];
  return s * g.grid().cell_volume();
}

}  // namespace

TEST_CASE("flat kernel is the Euclidean Gaussian") {
  const FlowTrajectory& tr = flat_trajectory();
  const GridSpec& g = tr.grid();
  const std::size_t y = g.nearest_node({});
  const double tau = 2e-3;
  const KernelField k = heat_kernel(tr, y, 0.0, tau);
  CHECK(k.mass == doctest::Approx(1.0).epsilon(1e-6));
  const double peak = 1.0 / (4.0 * M_PI * tau);
  CHECK(k.density[y] == doctest::Approx(peak).epsilon(0.02));
  const std::size_t z = g.nearest_node({0.1, 0.0, 0.0});
  const Vec pz = g.position(z);
  CHECK(k.density[z] == doctest::Approx(peak * std::exp(-(pz[0] * pz[0] + pz[1] * pz[1]) / (4.0 * tau))).epsilon(0.03));
}

TEST_CASE("flat Gaussian tail gives D close to 4") {
  const FlowTrajectory& tr = flat_trajectory();
  const GridSpec& g = tr.grid();
  const std::size_t y = g.nearest_node({});
  const KernelField k = heat_kernel(tr, y, 0.0, 2e-3);
  std::vector<double> radii;
  for (int j = 1; j <= 8; ++j) radii.push_back(0.75 * j * std::sqrt(2e-3));
  const TailFit fit = fit_gaussian_tail(k, tr.metric_at(2e-3), g.position(y), radii);
  CHECK(fit.D == doctest::Approx(4.0).epsilon(0.05));
  CHECK_THROWS_AS(fit_gaussian_tail(k, tr.metric_at(2e-3), g.position(y), {0.1, 0.2}), Error);
}

TEST_CASE("forward and conjugate solves are exact adjoints") {
  const FlowTrajectory& tr = curved_trajectory();
  const GridSpec& g = tr.grid();
  ScalarField w0 = sample(g, [](const Vec& x) { return std::exp(-10.0 * (x[0] * x[0] + x[1] * x[1])); });
  ScalarField phiT = sample(g, [](const Vec& x) { return std::exp(-20.0 * ((x[0] - 0.1) * (x[0] - 0.1) + x[1] * x[1])); });
  for (std::size_t n = 0; n < g.node_count(); ++n)
    if (g.in_collar(n)) w0[n] = phiT[n] = 0.0;
  const ScalarPropagator P(tr);
  const ScalarField wT = P.forward(w0, 5e-4, 2e-3);
  const ScalarField phis = P.backward(phiT, 2e-3, 5e-4);
  const double a = weighted_pairing(wT, phiT, tr.metric_at(2e-3));
  const double b = weighted_pairing(w0, phis, tr.metric_at(5e-4));
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("curved kernel keeps unit mass") {
  const FlowTrajectory& tr = curved_trajectory();
  const KernelField k = heat_kernel(tr, tr.grid().nearest_node({}), 5e-4, 2e-3);
  CHECK(k.mass == doctest::Approx(1.0).epsilon(0.01));
  const KernelField ks = heat_kernel_source_side(tr, tr.grid().nearest_node({}), 5e-4, 2e-3);
  for (double v : ks.density.values()) CHECK(v >= 0.0);
}

TEST_CASE("conjugate solve validates its inputs") {
  const FlowTrajectory& tr = curved_trajectory();
  const GridSpec& g = tr.grid();
  ScalarField phi(g, 0.0);
  CHECK_THROWS_AS(conjugate_heat_solve(tr, phi, 1e-3, 2e-3), Error);
  phi[0] = 1.0;  // collar node
  CHECK_THROWS_AS(conjugate_heat_solve(tr, phi, 2e-3, 1e-3), Error);
  ScalarField neg(g, 0.0);
  neg[g.nearest_node({})] = -1.0;
  CHECK_THROWS_AS(conjugate_heat_solve(tr, neg, 2e-3, 1e-3), Error);
  CHECK_THROWS_AS(heat_kernel(tr, 0, 0.0, 1e-3), Error);
  CHECK_THROWS_AS(heat_kernel(tr, g.nearest_node({}), 0.0, 1.0), Error);
}
