#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "rdtf/grid.hpp"

namespace rdtf {

inline double det(const Mat& a, int n) {
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// Closed-form inverse for n ≤ 3. The caller checks conditioning first.
inline Mat inverse(const Mat& a, int n) {
  Mat r{};
  const double d = det(a, n);
  if (n == 2) {
    r[0][0] = a[1][1] / d;
    r[1][1] = a[0][0] / d;
    r[0][1] = -a[0][1] / d;
    r[1][0] = -a[1][0] / d;
    return r;
  }
  r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / d;
  r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / d;
  r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / d;
  r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / d;
  r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / d;
  r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / d;
  r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / d;
  r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / d;
  r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / d;
  return r;
}

/// Eigenvalue range (min, max) of a symmetric matrix, closed form for n ≤ 3.
inline std::pair<double, double> eigen_range(const Mat& a, int n) {
  if (n == 2) {
    const double m = 0.5 * (a[0][0] + a[1][1]);
    const double d = 0.5 * (a[0][0] - a[1][1]);
    const double r = std::sqrt(d * d + a[0][1] * a[0][1]);
    return {m - r, m + r};
  }
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  if (p1 == 0.0) {
    const double lo = std::min({a[0][0], a[1][1], a[2][2]});
    const double hi = std::max({a[0][0], a[1][1], a[2][2]});
    return {lo, hi};
  }
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                    (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  double r = det(b, 3) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {e3, e1};
}

/// Frobenius norm of the n×n block of a - δ.
inline double deviation_from_identity(const Mat& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = a[i][j] - (i == j ? 1.0 : 0.0);
      s += d * d;
    }
  return std::sqrt(s);
}

}  // namespace rdtf
