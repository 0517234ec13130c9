#include "rdtf/curvature.hpp"

#include <cmath>
#include <sstream>

#include "rdtf/linalg.hpp"

namespace rdtf {

namespace {

constexpr double kEigenFloor = 1e-10;

template <int D>
void fill_geometry(const MetricJet& jet, LocalGeometry& geo, bool with_curvature) {
  const Mat& gi = geo.ginv;
  // Lowered connection Γ_{l,ij}.
  double low[D][D][D];
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j)
        low[l][i][j] = low[l][j][i] = 0.5 * (jet.d1[i][j][l] + jet.d1[j][i][l] - jet.d1[l][i][j]);
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) {
        double s = 0.0;
        for (int l = 0; l < D; ++l) s += gi[k][l] * low[l][i][j];
        geo.gamma[k][i][j] = geo.gamma[k][j][i] = s;
      }
  for (int k = 0; k < D; ++k) {
    double s = 0.0;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) s += gi[i][j] * geo.gamma[k][i][j];
    geo.deturck[k] = -s;
  }
  if (!with_curvature) return;

  // ∂_m g^{kl} = -g^{ka} ∂_m g_ab g^{bl}
  double dginv[D][D][D];
  for (int m = 0; m < D; ++m) {
    double tmp[D][D];
    for (int k = 0; k < D; ++k)
      for (int b = 0; b < D; ++b) {
        double s = 0.0;
        for (int a = 0; a < D; ++a) s += gi[k][a] * jet.d1[m][a][b];
        tmp[k][b] = s;
      }
    for (int k = 0; k < D; ++k)
      for (int l = 0; l < D; ++l) {
        double s = 0.0;
        for (int b = 0; b < D; ++b) s += tmp[k][b] * gi[b][l];
        dginv[m][k][l] = -s;
      }
  }
  for (int m = 0; m < D; ++m)
    for (int k = 0; k < D; ++k)
      for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j) {
          double s = 0.0;
          for (int l = 0; l < D; ++l) {
            const double dlow =
                0.5 * (jet.d2[m][i][j][l] + jet.d2[m][j][i][l] - jet.d2[m][l][i][j]);
            s += dginv[m][k][l] * low[l][i][j] + gi[k][l] * dlow;
          }
          geo.dgamma[m][k][i][j] = geo.dgamma[m][k][j][i] = s;
        }
  for (int m = 0; m < D; ++m)
    for (int k = 0; k < D; ++k) {
      double s = 0.0;
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) s += dginv[m][i][j] * geo.gamma[k][i][j] + gi[i][j] * geo.dgamma[m][k][i][j];
      geo.ddeturck[m][k] = -s;
    }
  // Ric_jk = ∂_i Γ^i_jk - ∂_j Γ^i_ik + Γ^i_im Γ^m_jk - Γ^i_jm Γ^m_ik
  double trace_gamma[D];
  for (int m = 0; m < D; ++m) {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += geo.gamma[i][i][m];
    trace_gamma[m] = s;
  }
  for (int j = 0; j < D; ++j)
    for (int k = j; k < D; ++k) {
      double s = 0.0;
      for (int i = 0; i < D; ++i) {
        s += geo.dgamma[i][i][j][k] - geo.dgamma[j][i][i][k];
        for (int m = 0; m < D; ++m) s -= geo.gamma[i][j][m] * geo.gamma[m][i][k];
      }
      for (int m = 0; m < D; ++m) s += trace_gamma[m] * geo.gamma[m][j][k];
      geo.ricci[j][k] = geo.ricci[k][j] = s;
    }
  double r = 0.0;
  for (int j = 0; j < D; ++j)
    for (int k = 0; k < D; ++k) r += gi[j][k] * geo.ricci[j][k];
  geo.scalar = r;
  // |Ric|² = g^{ia} g^{jb} Ric_ij Ric_ab
  double up[D][D];
  for (int i = 0; i < D; ++i)
    for (int b = 0; b < D; ++b) {
      double s = 0.0;
      for (int j = 0; j < D; ++j) s += geo.ricci[i][j] * gi[j][b];
      up[i][b] = s;
    }
  double nsq = 0.0;
  for (int i = 0; i < D; ++i)
    for (int b = 0; b < D; ++b) nsq += up[i][b] * up[b][i];
  geo.ricci_norm_sq = nsq;
}

template <int D>
double riemann_norm_impl(const LocalGeometry& geo) {
  // R^l_{ijk} = ∂_i Γ^l_jk - ∂_j Γ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik
  double rm[D][D][D][D];
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) {
          double s = geo.dgamma[i][l][j][k] - geo.dgamma[j][l][i][k];
          for (int m = 0; m < D; ++m) s += geo.gamma[l][i][m] * geo.gamma[m][j][k] - geo.gamma[l][j][m] * geo.gamma[m][i][k];
          rm[l][i][j][k] = s;
        }
  // Lower l, raise i, j, k, contract.
  const Mat& g = geo.g;
  const Mat& gi = geo.ginv;
  double total = 0.0;
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) {
          // fully raised-on-ijk, lowered-on-l copy
          double up = 0.0;
          for (int p = 0; p < D; ++p)
            for (int a = 0; a < D; ++a)
              for (int b = 0; b < D; ++b)
                for (int c = 0; c < D; ++c)
                  up += g[l][p] * gi[i][a] * gi[j][b] * gi[k][c] * rm[p][a][b][c];
          total += rm[l][i][j][k] * up;
        }
  return std::sqrt(std::max(total, 0.0));
}

}  // namespace

LocalGeometry local_geometry(const MetricJet& jet, int dim, std::size_t node, bool with_curvature) {
  LocalGeometry geo;
  geo.dim = dim;
  geo.g = jet.g;
  const auto [lo, hi] = eigen_range(jet.g, dim);
  if (!(lo > kEigenFloor)) {
    std::ostringstream os;
    os << "metric not invertible at node " << node << " (min eigenvalue " << lo << ")";
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
  geo.ginv = inverse(jet.g, dim);
  geo.volume_density = std::sqrt(det(jet.g, dim));
  if (dim == 2)
    fill_geometry<2>(jet, geo, with_curvature);
  else
    fill_geometry<3>(jet, geo, with_curvature);
  return geo;
}

double riemann_norm(const LocalGeometry& geo) {
  return geo.dim == 2 ? riemann_norm_impl<2>(geo) : riemann_norm_impl<3>(geo);
}

Mat deturck_velocity(const LocalGeometry& geo, const MetricJet& jet) {
  const int n = geo.dim;
  Mat v{};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double lie = 0.0;
      for (int k = 0; k < n; ++k)
        lie += geo.deturck[k] * jet.d1[k][i][j] + geo.g[k][j] * geo.ddeturck[i][k] + geo.g[i][k] * geo.ddeturck[j][k];
      v[i][j] = v[j][i] = -2.0 * geo.ricci[i][j] - lie;
    }
  return v;
}

ConnectionField christoffel(const MetricField& g) {
  ConnectionField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node)
    out[node] = local_geometry(metric_jet(g, node, false), g.grid().dim, node, false).gamma;
  return out;
}

VectorField deturck_vector(const MetricField& g) {
  VectorField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node)
    out[node] = local_geometry(metric_jet(g, node, false), g.grid().dim, node, false).deturck;
  return out;
}

CurvatureBundle curvature(const MetricField& g) {
  CurvatureBundle b{Sym2Field(g.grid()), ScalarField(g.grid()), ScalarField(g.grid()), ScalarField(g.grid())};
  for (std::size_t node = 0; node < g.size(); ++node) {
    const LocalGeometry geo = local_geometry(metric_jet(g, node, true), g.grid().dim, node, true);
    b.ricci[node] = geo.ricci;
    b.scalar[node] = geo.scalar;
    b.riem_norm[node] = riemann_norm(geo);
    b.ricci_norm_sq[node] = geo.ricci_norm_sq;
  }
  return b;
}

ScalarField scalar_curvature(const MetricField& g) {
  ScalarField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node)
    out[node] = local_geometry(metric_jet(g, node, true), g.grid().dim, node, true).scalar;
  return out;
}

ScalarField laplace_beltrami(const MetricField& g, const ScalarField& f) {
  require_same_grid(g.grid(), f.grid());
  const int n = g.grid().dim;
  ScalarField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node) {
    const LocalGeometry geo = local_geometry(metric_jet(g, node, false), n, node, false);
    const ScalarJet fj = scalar_jet(f, node);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += geo.deturck[i] * fj.d1[i];
      for (int j = 0; j < n; ++j) s += geo.ginv[i][j] * fj.d2[i][j];
    }
    out[node] = s;
  }
  return out;
}

ScalarField volume_density(const MetricField& g) {
  ScalarField out(g.grid());
  for (std::size_t node = 0; node < g.size(); ++node) out[node] = std::sqrt(det(g[node], g.grid().dim));
  return out;
}

}  // namespace rdtf
