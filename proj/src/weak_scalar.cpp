#include "rdtf/weak_scalar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdtf/curvature.hpp"
#include "rdtf/field_ops.hpp"
#include "rdtf/linalg.hpp"
#include "rdtf/norms.hpp"

namespace rdtf {

namespace {

double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep_d1(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double smoothstep_d2(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

double euclid(const Vec& x, const Vec& c, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
  return std::sqrt(s);
}

}  // namespace

double CutoffProfile::value(double r) const {
  if (r <= r_in) return 1.0;
  if (r >= r_out) return 0.0;
  return smoothstep((r_out - r) / (r_out - r_in));
}

double CutoffProfile::derivative(double r) const {
  if (r <= r_in || r >= r_out) return 0.0;
  const double w = r_out - r_in;
  return -smoothstep_d1((r_out - r) / w) / w;
}

double CutoffProfile::second_derivative(double r) const {
  if (r <= r_in || r >= r_out) return 0.0;
  const double w = r_out - r_in;
  return smoothstep_d2((r_out - r) / w) / (w * w);
}

double CutoffProfile::at(const Vec& x, int dim) const {
  if (kind == CutoffKind::PhiRadial) return value(euclid(x, Vec{}, dim));
  return value(euclid(x, centre, dim));
}

ScalarField CutoffProfile::field(const GridSpec& grid) const {
  ScalarField out(grid);
  for (std::size_t node = 0; node < out.size(); ++node) out[node] = at(grid.position(node), grid.dim);
  return out;
}

CutoffProfile make_cutoff(CutoffKind kind, double r_in, double r_out, const Vec& centre) {
  if (!(r_in >= 0.0) || !(r_in < r_out) || !std::isfinite(r_out)) {
    std::ostringstream os;
    os << "cutoff needs 0 <= r_in < r_out (got " << r_in << ", " << r_out << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  CutoffProfile c;
  c.kind = kind;
  c.centre = centre;
  c.r_in = r_in;
  c.r_out = r_out;
  constexpr int kSamples = 20000;
  double bound = 0.0;
  for (int k = 1; k < kSamples; ++k) {
    const double r = r_in + (r_out - r_in) * double(k) / kSamples;
    bound = std::max(bound, std::abs(c.derivative(r)));
    const double v = c.value(r);
    if (v > 0.0) bound = std::max(bound, -c.second_derivative(r) / v);
  }
  c.c4 = bound * (1.0 + 1e-6);
  return c;
}

MetricField glue_to_flat(const MetricField& g_local, const CutoffProfile& chi) {
  const GridSpec& grid = g_local.grid();
  const int n = grid.dim;
  MetricField out(grid);
  for (std::size_t node = 0; node < out.size(); ++node) {
    const double c = chi.at(grid.position(node), n);
    if (c == 0.0) continue;
    if (grid.in_collar(node)) {
      std::ostringstream os;
      os << "cutoff support reaches the boundary collar at node " << node;
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
    if (c == 1.0) {
      out[node] = g_local[node];
      continue;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[node][i][j] = c * g_local[node][i][j] + (1.0 - c) * (i == j ? 1.0 : 0.0);
  }
  return out;
}

void validate_cone(int dim, const ConeParams& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (!(p.p > dim)) fail("cone datum needs p > n");
  if (!(p.sigma < 1.0) || !(p.sigma > 1.0 - dim / p.p)) {
    std::ostringstream os;
    os << "cone exponent sigma must lie in (1 - n/p, 1) = (" << 1.0 - dim / p.p << ", 1)";
    fail(os.str());
  }
  if (!(std::abs(p.amplitude) < 0.5)) fail("cone amplitude must satisfy |a| < 0.5");
  if (p.bump_outer != 0.0 && !(p.bump_inner >= 0.0 && p.bump_inner < p.bump_outer && p.bump_outer <= 1.0))
    fail("cone bump radii must satisfy 0 <= inner < outer <= 1");
}

MetricField make_w1p_cone(const GridSpec& grid, const ConeParams& params) {
  validate_cone(grid.dim, params);
  const int n = grid.dim;
  MetricField g(grid);
  if (params.amplitude == 0.0) return g;
  CutoffProfile eta;
  const bool bump = params.bump_outer != 0.0;
  if (bump) eta = make_cutoff(CutoffKind::ChiSpace, params.bump_inner, params.bump_outer, params.centre);
  for (std::size_t node = 0; node < g.size(); ++node) {
    const Vec x = grid.position(node);
    const double e = bump ? eta.at(x, n) : 1.0;
    if (e == 0.0) continue;
    const double s = params.amplitude * e * std::pow(euclid(x, params.centre, n), params.sigma);
    if (params.direction == ConeDirection::Identity)
      for (int i = 0; i < n; ++i) g[node][i][i] += s;
    else
      g[node][0][0] += s;
  }
  g.validate();
  return g;
}

DistributionalScalarTerms distributional_scalar(const MetricField& g, const ScalarField& u) {
  require_same_grid(g.grid(), u.grid());
  const GridSpec& grid = g.grid();
  const int n = grid.dim;
  for (std::size_t node = 0; node < u.size(); ++node)
    if (u[node] != 0.0 && grid.in_collar(node)) {
      std::ostringstream os;
      os << "test function is supported in the boundary collar (node " << node << ")";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }

  DistributionalScalarTerms out{VectorField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid), 0.0};
  ScalarField weighted(grid);
  for (std::size_t node = 0; node < g.size(); ++node) {
    const MetricJet jet = metric_jet(g, node, false);
    const LocalGeometry geo = local_geometry(jet, n, node, false);
    const Mat& gi = geo.ginv;
    const Mat3& G = geo.gamma;
    out.volume_ratio[node] = geo.volume_density;
    weighted[node] = u[node] * geo.volume_density;

    // ∂_k g^{ij} = -g^{ia} ∂_k g_ab g^{bj}
    Mat3 dgi{};
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += gi[i][a] * jet.d1[k][a][b] * gi[b][j];
          dgi[k][i][j] = -s;
        }
    Vec trace{};  // Γ^j_{jk}
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) trace[k] += G[j][j][k];

    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) {
        v -= gi[i][k] * trace[i];
        for (int j = 0; j < n; ++j) v += gi[i][j] * G[k][i][j];
      }
      out.V[node][k] = v;
    }
    double f = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double quad = 0.0;
        for (int k = 0; k < n; ++k) {
          f += -dgi[k][i][j] * G[k][i][j];
          for (int l = 0; l < n; ++l) quad += G[k][k][l] * G[l][i][j] - G[k][j][l] * G[l][i][k];
        }
        f += gi[i][j] * quad;
      }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) f += dgi[k][i][k] * trace[i];
    out.F[node] = f;
  }

  const VectorField dw = gradient(weighted);
  double total = 0.0;
  for (std::size_t node = 0; node < g.size(); ++node) {
    double s = out.F[node] * weighted[node];
    for (int k = 0; k < n; ++k) s -= out.V[node][k] * dw[node][k];
    out.integrand[node] = s;
    total += s;
  }
  out.value = total * grid.cell_volume();
  return out;
}

double weak_lower_bound_margin(const MetricField& g, const ScalarField& u, double kappa) {
  const DistributionalScalarTerms t = distributional_scalar(g, u);
  return t.value - kappa * integrate(u, t.volume_ratio);
}

double gluing_error_check(const MetricField& g_local, const CutoffProfile& chi, const ScalarField& u) {
  const double eps = c0_distance(g_local, MetricField::flat(g_local.grid())).value;
  if (eps == 0.0) return 0.0;
  const MetricField g0 = glue_to_flat(g_local, chi);
  // Node-wise differences: where the two metrics agree on a whole stencil the
  // contributions cancel exactly instead of leaving round-off of the totals.
  const ScalarField a = distributional_scalar(g0, u).integrand;
  const ScalarField b = distributional_scalar(g_local, u).integrand;
  double diff = 0.0;
  for (std::size_t node = 0; node < a.size(); ++node) diff += a[node] - b[node];
  return std::abs(diff) * g0.grid().cell_volume() / eps;
}

ScalarField negative_part(const ScalarField& R, double kappa) {
  ScalarField f(R.grid());
  for (std::size_t node = 0; node < R.size(); ++node) f[node] = std::max(kappa - R[node], 0.0);
  return f;
}

ScalarField distance_cutoff(const DistanceField& d, const CutoffProfile& phi, double t, double gamma) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "distance cutoff needs t > 0");
  const double scale = std::pow(t, gamma);
  ScalarField out(d.d.grid());
  for (std::size_t node = 0; node < out.size(); ++node) out[node] = phi.value(scale * d.d[node]);
  return out;
}

EnergyTrace energy_functional(const FlowTrajectory& traj, const std::vector<double>& times,
                              const std::vector<ScalarField>& phi, const std::vector<ScalarField>& psi,
                              double kappa) {
  if (phi.size() != times.size() || psi.size() != times.size())
    throw Error(ErrorCode::InvalidArgument, "energy functional needs one phi and one psi field per time");
  EnergyTrace tr;
  tr.kappa = kappa;
  const int n = traj.grid().dim;
  const double cell = traj.grid().cell_volume();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const long k = traj.find(times[i]);
    if (k < 0) {
      std::ostringstream os;
      os << "energy time " << times[i] << " is not a stored slice";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
    const MetricField& g = traj[k].metric;
    require_same_grid(g.grid(), phi[i].grid());
    require_same_grid(g.grid(), psi[i].grid());
    const ScalarField f = negative_part(scalar_curvature(g), kappa);
    double e = 0.0, annulus = 0.0, fs = 0.0;
    for (std::size_t node = 0; node < g.size(); ++node) {
      const double rho = std::sqrt(det(g[node], n));
      e += f[node] * phi[i][node] * psi[i][node] * rho;
      if (psi[i][node] > 0.0 && psi[i][node] < 1.0) annulus += phi[i][node] * rho;
      fs = std::max(fs, f[node]);
    }
    tr.times.push_back(times[i]);
    tr.energy.push_back(e * cell);
    tr.annulus_mass.push_back(annulus * cell);
    tr.f_sup.push_back(fs);
  }
  return tr;
}

}  // namespace rdtf
