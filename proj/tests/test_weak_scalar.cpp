#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rdtf/curvature.hpp"
#include "rdtf/field_ops.hpp"
#include "rdtf/flow.hpp"
#include "rdtf/weak_scalar.hpp"

using namespace rdtf;

namespace {

MetricField smooth_metric(const GridSpec& g) {
  MetricField m(g);
  for (std::size_t n = 0; n < m.size(); ++n) {
    const Vec x = g.position(n);
    const double r2 = x[0] * x[0] + x[1] * x[1], f = 0.1 * std::exp(-r2 / 0.1);
    m[n][0][0] = std::exp(2.0 * f) + 0.05 * x[0] * std::exp(-r2 / 0.1);
    m[n][1][1] = std::exp(2.0 * f);
    m[n][0][1] = m[n][1][0] = 0.03 * std::exp(-r2 / 0.08);
  }
  return m;
}

ScalarField test_function(const GridSpec& g) {
  const CutoffProfile phi = make_cutoff(CutoffKind::PhiRadial, 0.2, 0.6);
  return sample(g, [&](const Vec& x) { return phi.value(std::hypot(x[0], x[1])) * (1.0 + 0.5 * x[1]); });
}

double pairing_error(int N) {
  const GridSpec g = GridSpec::make(2, 1.0, N, 0.25);
  const MetricField m = smooth_metric(g);
  const ScalarField u = test_function(g);
  const DistributionalScalarTerms t = distributional_scalar(m, u);
  const ScalarField R = scalar_curvature(m);
  ScalarField Ru(g);
  for (std::size_t n = 0; n < Ru.size(); ++n) Ru[n] = R[n] * u[n];
  return std::abs(t.value - integrate(Ru, t.volume_ratio));
}

}  // namespace

TEST_CASE("cutoff profiles are smooth steps with the right bounds") {
  const CutoffProfile c = make_cutoff(CutoffKind::PhiRadial, 0.5, 1.0);
  CHECK(c.value(0.2) == 1.0);
  CHECK(c.value(1.2) == 0.0);
  CHECK(c.value(0.75) == doctest::Approx(0.5));
  CHECK(c.derivative(0.5) == doctest::Approx(0.0));
  CHECK(c.c4 > 0.0);
  CHECK_THROWS_AS(make_cutoff(CutoffKind::PhiRadial, 1.0, 0.5), Error);
}

TEST_CASE("pairing of the flat metric vanishes") {
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  CHECK(distributional_scalar(MetricField::flat(g), test_function(g)).value == 0.0);
}

TEST_CASE("distributional pairing agrees with the classical integral at second order") {
  const double e1 = pairing_error(65), e2 = pairing_error(129);
  CHECK(std::log2(e1 / e2) > 1.9);
}

TEST_CASE("pairing rejects test functions reaching the collar") {
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  ScalarField u(g, 1.0);
  CHECK_THROWS_AS(distributional_scalar(MetricField::flat(g), u), Error);
}

TEST_CASE("radial cone integral matches the Gauss-Bonnet value") {
  // For g = e^{2f} δ in 2D, ∫ R u dμ = -2 ∫ u Δf dx = 2 ∫ ∇u·∇f dx.
  const GridSpec g = GridSpec::make(2, 1.0, 257, 0.25);
  ConeParams cp;
  cp.amplitude = 0.05;
  cp.bump_inner = 0.4;
  cp.bump_outer = 0.6;
  const MetricField m = make_w1p_cone(g, cp);
  const CutoffProfile phi = make_cutoff(CutoffKind::PhiRadial, 0.1, 0.3);
  const ScalarField u = sample(g, [&](const Vec& x) { return phi.value(std::hypot(x[0], x[1])); });
  const double weak = distributional_scalar(m, u).value;
  // f = ½ log(1 + a r^σ) inside the bump; ∫ 2 u' f' 2π r dr in polar form.
  double exact = 0.0;
  const int M = 200000;
  for (int i = 0; i < M; ++i) {
    const double r = 0.1 + (i + 0.5) * 0.2 / M;
    const double fp = 0.5 * cp.amplitude * cp.sigma * std::pow(r, cp.sigma - 1.0) / (1.0 + cp.amplitude * std::pow(r, cp.sigma));
    exact += 2.0 * phi.derivative(r) * fp * 2.0 * M_PI * r * (0.2 / M);
  }
  CHECK(weak == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("mollified cone converges to the pairing of the cone") {
  // Smoothing the cone tip at scale s changes the pairing by O(s^σ).
  const GridSpec g = GridSpec::make(2, 1.0, 129, 0.25);
  ConeParams cp;
  cp.amplitude = 0.05;
  cp.bump_inner = 0.4;
  cp.bump_outer = 0.6;
  const MetricField cone = make_w1p_cone(g, cp);
  const CutoffProfile phi = make_cutoff(CutoffKind::PhiRadial, 0.2, 0.5);
  const ScalarField u = sample(g, [&](const Vec& x) { return phi.value(std::hypot(x[0], x[1])); });
  const double target = distributional_scalar(cone, u).value;
  double prev = INFINITY;
  for (double s : {0.1, 0.05, 0.025}) {
    MetricField m(g);
    for (std::size_t n = 0; n < m.size(); ++n) {
      const Vec x = g.position(n);
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + s * s);
      const double b = make_cutoff(CutoffKind::PhiRadial, cp.bump_inner, cp.bump_outer).value(std::hypot(x[0], x[1]));
      m[n][0][0] = m[n][1][1] = 1.0 + cp.amplitude * std::pow(r, cp.sigma) * b;
    }
    const double e = std::abs(distributional_scalar(m, u).value - target);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("cone validation enforces the W1p window") {
  const GridSpec g = GridSpec::make(2, 1.0, 65, 0.25);
  ConeParams cp;
  cp.sigma = 0.4;  // needs σ > 1 - n/p = 0.5
  CHECK_THROWS_AS(make_w1p_cone(g, cp), Error);
  cp.sigma = 0.6;
  cp.p = 1.5;
  CHECK_THROWS_AS(make_w1p_cone(g, cp), Error);
  cp.p = 4.0;
  cp.amplitude = 0.7;
  CHECK_THROWS_AS(make_w1p_cone(g, cp), Error);
}

TEST_CASE("gluing to flat leaves the inner metric unchanged") {
  const GridSpec g = GridSpec::make(2, 2.5, 65, 0.3125);
  ConeParams cp;
  cp.amplitude = -0.05;
  cp.bump_outer = 0.0;
  const MetricField local = make_w1p_cone(g, cp);
  const MetricField glued = glue_to_flat(local, make_cutoff(CutoffKind::ChiSpace, 1.7, 2.1, {}));
  const std::size_t c = g.nearest_node({0.5, 0.5, 0.0});
  CHECK(glued[c][0][0] == local[c][0][0]);
  CHECK(glued.collar_deviation() == 0.0);
  CHECK_THROWS_AS(glue_to_flat(local, make_cutoff(CutoffKind::ChiSpace, 2.0, 2.4, {})), Error);
}

TEST_CASE("negative part") {
  const GridSpec g = GridSpec::make(2, 1.0, 33, 0.25);
  ScalarField R(g, 0.5);
  R[3] = -0.25;
  const ScalarField m = negative_part(R, 0.0);
  CHECK(m[3] == 0.25);
  CHECK(m[4] == 0.0);
}
