#include "obstacle_mcf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include <omp.h>

namespace obstacle_mcf {

Grid::Grid(int dim, std::span<const std::size_t> nodes, std::span<const double> extent) : dim_(dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (nodes.size() != static_cast<std::size_t>(dim) || extent.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("grid needs one node count and one extent per axis");
  }
  for (int a = 0; a < dim; ++a) {
    if (nodes[a] < kMinNodes) throw std::invalid_argument("grid needs at least 16 nodes per axis");
    if (!(extent[a] > 0.0)) throw std::invalid_argument("grid extent must be positive");
    nodes_[a] = nodes[a];
    extent_[a] = extent[a];
  }
  h_ = extent_[0] / static_cast<double>(nodes_[0] - 1);
  for (int a = 1; a < dim; ++a) {
    const double ha = extent_[a] / static_cast<double>(nodes_[a] - 1);
    if (std::abs(ha - h_) > 1e-12 * h_) {
      throw std::invalid_argument("grid spacing must be identical on every axis");
    }
  }
  strides_[2] = 1;
  strides_[1] = nodes_[2];
  strides_[0] = nodes_[1] * nodes_[2];
  cell_volume_ = std::pow(h_, dim);
}

Grid Grid::cube(int dim, std::size_t nodes, double extent) {
  const std::array<std::size_t, 3> n{nodes, nodes, nodes};
  const std::array<double, 3> e{extent, extent, extent};
  return Grid(dim, std::span(n.data(), static_cast<std::size_t>(dim)),
              std::span(e.data(), static_cast<std::size_t>(dim)));
}

Index3 Grid::unflatten(std::size_t flat) const noexcept {
  Index3 idx{};
  idx[0] = flat / strides_[0];
  flat -= idx[0] * strides_[0];
  idx[1] = flat / strides_[1];
  idx[2] = flat - idx[1] * strides_[1];
  return idx;
}

Point Grid::position(const Index3& idx) const noexcept {
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = coord(a, idx[a]);
  return x;
}

Point Grid::position(std::size_t flat) const noexcept { return position(unflatten(flat)); }

double Grid::distance_to_boundary(const Point& x) const noexcept {
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim_; ++a) {
    d = std::min(d, 0.5 * extent_[a] - std::abs(x[a]));
  }
  return d;
}

double ScalarField::sup_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

int configured_threads() {
  if (const char* env = std::getenv("OBSTACLE_MCF_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void apply_thread_configuration() { omp_set_num_threads(configured_threads()); }

}  // namespace obstacle_mcf
