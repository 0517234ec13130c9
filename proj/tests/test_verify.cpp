#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rdtf/fit.hpp"
#include "rdtf/flow.hpp"
#include "rdtf/verify.hpp"

using namespace rdtf;

namespace {

const FlowTrajectory& flat_trajectory() {
  static const FlowTrajectory tr = run_flow(MetricField::flat(GridSpec::make(2, 1.0, 65, 0.25)), 1e-2,
                                            geometric_snapshots(1e-2, 20, 2));
  return tr;
}

}  // namespace

TEST_CASE("log-log fit recovers an exact power law") {
  std::vector<double> t, y;
  for (int k = 0; k < 12; ++k) {
    t.push_back(std::pow(10.0, -4.0 + 0.2 * k));
    y.push_back(3.0 * std::pow(t.back(), -0.75));
  }
  const FitReport r = exponent_report("q", -0.75, t, y);
  CHECK(r.fitted == doctest::Approx(-0.75));
  CHECK(r.constant == doctest::Approx(3.0));
  CHECK(r.pass);
  CHECK(r.decades() == doctest::Approx(2.2));
}

TEST_CASE("fits refuse short ranges") {
  std::vector<double> t{1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3, 7e-3, 8e-3, 9e-3};
  std::vector<double> y(t.size(), 1.0);
  CHECK_THROWS_AS(loglog_fit(t, y), Error);  // under 1.5 decades
  CHECK_THROWS_AS(loglog_fit({1e-4, 1e-3, 1e-2}, {1.0, 2.0, 3.0}), Error);  // under 8 samples
}

TEST_CASE("shrinking-ball schedule sums to its closed form") {
  const ShrinkingBallSchedule s = make_schedule(0, 0.25, 1e-2, 200);
  CHECK(s.radius(1) == doctest::Approx(std::pow(5e-3, 0.25)));
  for (int k : {1, 10, 100}) CHECK(s.accumulated(k) == doctest::Approx(s.limit() * (1.0 - std::pow(2.0, -0.25 * k))));
  CHECK(std::abs(s.accumulated(200) - s.limit()) <= 1e-10 * s.limit());
  CHECK(lambda_exponent(0.25, 3.0) == doctest::Approx(0.5));
}

TEST_CASE("beta outside (0, 1/2) is rejected") {
  CHECK_THROWS_AS(validate_beta(0.6), Error);
  CHECK_THROWS_AS(validate_beta(0.0), Error);
  CHECK_NOTHROW(validate_beta(0.25));
}

TEST_CASE("tail series is bounded by the sharp constant") {
  const TailConstant c = tail_constant(0.25, 3.0, 4.2);
  CHECK(c.sharp > c.unit);  // (γ/e)^γ > 1 for γ = 3
  for (double t = 1.0; t >= 1e-10; t /= 10.0) CHECK(tail_series(t, 0.25, 4.2) <= c.sharp * std::pow(t, c.lambda));
}

TEST_CASE("flat trajectory: beta-weak estimate and deficit are zero") {
  const FlowTrajectory& tr = flat_trajectory();
  const std::size_t x = tr.grid().nearest_node({});
  const BetaWeakResult r = beta_weak_estimate(tr, x, 0.25);
  CHECK(r.value == 0.0);
  CHECK(r.raw == 0.0);
  for (std::size_t i = 1; i < r.per_c.size(); ++i) CHECK(r.per_c[i].raw <= r.per_c[i - 1].raw);
  const FitReport d = lower_bound_decay_fit(tr, x, 0.0, 0.25, 3.0);
  CHECK(d.pass);
  CHECK(d.note.rfind("bound slack", 0) == 0);
  CHECK(resolved_time_floor(tr) == doctest::Approx(tr.scheme().dt).epsilon(1e-6));
}

TEST_CASE("flat two-cell Davies check holds with the 4(T-t) exponent") {
  const FlowTrajectory& tr = flat_trajectory();
  const Region U1{{}, 0.0, 0.1};
  const Region U2{{}, 0.3, 0.5};
  CHECK(Region::distance(U1, U2, 2) == doctest::Approx(0.2));
  const DaviesResult d = davies_check(tr, U1, U2, tr.times()[4], tr.times()[18], flow_constants(tr));
  CHECK(d.lhs > 0.0);
  CHECK(d.holds_standard);
  CHECK_THROWS_AS(davies_check(tr, U1, Region{{}, 0.05, 0.5}, 1e-3, 2e-3, flow_constants(tr)), Error);
}

TEST_CASE("flat constants vanish") {
  const FlowConstants c = flow_constants(flat_trajectory());
  CHECK(c.C1 == 0.0);
  CHECK(c.c2eps == 0.0);
}

TEST_CASE("glued-cone pipeline parameters are validated") {
  Theorem45Params p;
  p.grid = GridSpec::make(2, 2.5, 65, 0.3125);
  p.gamma = 1.5;  // needs γ > 1/(1 - 2β) = 2
  CHECK_THROWS_AS(validate_theorem45(p), Error);
  p.gamma = 3.0;
  p.chi_outer = 2.4;  // reaches the collar
  CHECK_THROWS_AS(validate_theorem45(p), Error);
}

TEST_CASE("glued-cone pipeline is trivial on the flat datum") {
  Theorem45Params p;
  p.grid = GridSpec::make(2, 2.5, 65, 0.3125);
  p.cone.amplitude = 0.0;
  p.cone.bump_outer = 0.0;
  const Theorem45Result r = theorem45_pipeline(p);
  CHECK(r.eps == 0.0);
  for (double e : r.energy.energy) CHECK(e == 0.0);
  CHECK(r.beta_weak.value == 0.0);
  CHECK(r.pass);
}
