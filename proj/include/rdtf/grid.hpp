#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdtf {

inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<Vec, kMaxDim>;
/// Rank-3 array indexed [k][i][j]; used both for ∂_k g_ij and for Γ^k_ij.
using Mat3 = std::array<Mat, kMaxDim>;

enum class ErrorCode {
  InvalidArgument = 1,
  GridMismatch,
  NotPositiveDefinite,
  CflViolation,
  ResolutionFloor,
  InsufficientRange,
  Io,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Uniform lattice over the box [-L, L]^n with N points per axis. Nodes are
/// ordered row-major: the last axis varies fastest.
struct GridSpec {
  int dim = 2;
  double half_width = 1.0;
  int points = 65;
  double collar_width = 0.1;

  /// Validating constructor. Throws InvalidArgument on n ∉ {2,3}, N < 16,
  /// L ≤ 0 or w < 4h.
  static GridSpec make(int dim, double half_width, int points, double collar_width);

  double spacing() const { return 2.0 * half_width / (points - 1); }
  double cell_volume() const;
  std::size_t node_count() const;
  std::size_t stride(int axis) const;

  double coord(int i) const { return -half_width + i * spacing(); }
  std::array<int, kMaxDim> unflatten(std::size_t node) const;
  std::size_t flatten(const std::array<int, kMaxDim>& idx) const;
  Vec position(std::size_t node) const;
  /// Node closest to a physical point (clamped to the box).
  std::size_t nearest_node(const Vec& x) const;

  /// True when any coordinate lies within the flat collar |x_a| > L - w.
  bool in_collar(std::size_t node) const;

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && points == o.points && half_width == o.half_width &&
           collar_width == o.collar_width;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

void require_same_grid(const GridSpec& a, const GridSpec& b);

template <class T>
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, const T& fill = T{})
      : grid_(grid), values_(grid.node_count(), fill) {}

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  T& operator[](std::size_t n) { return values_[n]; }
  const T& operator[](std::size_t n) const { return values_[n]; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

 private:
  GridSpec grid_;
  std::vector<T> values_;
};

using ScalarField = Field<double>;
/// Contravariant components X^k.
using VectorField = Field<Vec>;
using Sym2Field = Field<Mat>;
/// ∂_k T_ij per node, indexed [k][i][j].
using Rank3Field = Field<Mat3>;

Mat identity_matrix(int dim);

/// Symmetric positive-definite metric per node, with an optional time tag.
class MetricField : public Sym2Field {
 public:
  MetricField() = default;
  explicit MetricField(const GridSpec& grid) : Sym2Field(grid, identity_matrix(grid.dim)) {}

  static MetricField flat(const GridSpec& grid) { return MetricField(grid); }

  std::optional<double> time_tag;

  /// Exact symmetry and an eigenvalue floor at every node. Throws.
  void validate() const;
  /// Largest |g_ij - δ_ij| over collar nodes.
  double collar_deviation() const;
};

}  // namespace rdtf
