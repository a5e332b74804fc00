#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace obstacle_mcf {

using Point = std::array<double, 3>;
using Index3 = std::array<std::size_t, 3>;

/// Uniform node lattice on the box prod_i [-extent_i/2, extent_i/2].
/// Axes beyond `dim` have one node. Storage is row-major with axis 0 slowest.
class Grid {
 public:
  static constexpr std::size_t kMinNodes = 16;

  Grid() = default;
  /// Throws std::invalid_argument unless dim is 1..3, every active axis has
  /// at least kMinNodes nodes and all axes share one spacing.
  Grid(int dim, std::span<const std::size_t> nodes, std::span<const double> extent);

  /// Square/cubic box of side `extent` with `nodes` per axis.
  static Grid cube(int dim, std::size_t nodes, double extent);

  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  std::size_t nodes(int axis) const noexcept { return nodes_[axis]; }
  double extent(int axis) const noexcept { return extent_[axis]; }
  const Index3& shape() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_[0] * nodes_[1] * nodes_[2]; }
  std::size_t stride(int axis) const noexcept { return strides_[axis]; }
  /// h^dim, the weight of every node in the midpoint rule.
  double cell_volume() const noexcept { return cell_volume_; }

  /// Measured from the box centre so mirror-image nodes get coordinates of
  /// exactly opposite sign.
  double coord(int axis, std::size_t i) const noexcept {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(nodes_[axis] - 1)) * h_;
  }
  Index3 unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(const Index3& idx) const noexcept {
    return idx[0] * strides_[0] + idx[1] * strides_[1] + idx[2] * strides_[2];
  }
  Point position(std::size_t flat) const noexcept;
  Point position(const Index3& idx) const noexcept;

  /// Number of lines along the last active axis; reductions are partitioned
  /// by line so results do not depend on the thread count.
  std::size_t line_count() const noexcept { return size() / nodes_[dim_ - 1]; }
  std::size_t line_length() const noexcept { return nodes_[dim_ - 1]; }

  /// Distance from a point to the nearest face of the box (active axes).
  double distance_to_boundary(const Point& x) const noexcept;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_ = 0;
  Index3 nodes_{1, 1, 1};
  std::array<double, 3> extent_{0.0, 0.0, 0.0};
  Index3 strides_{0, 0, 0};
  double h_ = 0.0;
  double cell_volume_ = 0.0;
};

/// One value per grid node.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }

  double sup_abs() const;
};

/// Neighbour of `i` along `axis` at offset -1 or +1, mirrored at the faces
/// (the ghost node of a homogeneous Neumann condition).
inline std::size_t reflected_index(std::size_t i, std::size_t n, int offset) noexcept {
  if (offset < 0) return i == 0 ? (n > 1 ? 1 : 0) : i - 1;
  return i + 1 == n ? (n > 1 ? n - 2 : 0) : i + 1;
}

/// Pairwise summation of partial sums.
double pairwise_sum(std::span<const double> values);

/// Worker count from OBSTACLE_MCF_THREADS (default: hardware concurrency).
int configured_threads();
/// Applies configured_threads() to the OpenMP runtime.
void apply_thread_configuration();

}  // namespace obstacle_mcf
