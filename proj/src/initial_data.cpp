#include "obstacle_mcf/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <numbers>

#include "obstacle_mcf/errors.hpp"
#include "obstacle_mcf/potential.hpp"

namespace obstacle_mcf {

namespace {

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double sphere_distance(const Sphere& s, const Point& x, int dim) {
  return s.radius - distance(x, s.center, dim);
}

// Smallest distance from a ball to the faces of the box.
double ball_clearance(const Point& center, double radius, const Grid& grid) {
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dim(); ++a) {
    d = std::min(d, 0.5 * grid.extent(a) - std::abs(center[a]) - radius);
  }
  return d;
}

}  // namespace

double signed_distance(const Shape& shape, const Point& x, int dim) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return sphere_distance(s, x, dim);
        } else if constexpr (std::is_same_v<T, Annulus>) {
          const double r = distance(x, s.center, dim);
          return std::min(r - s.r_inner, s.r_outer - r);
        } else {
          return std::max(sphere_distance(s.first, x, dim), sphere_distance(s.second, x, dim));
        }
      },
      shape);
}

void validate_shape(const Shape& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          if (!(s.radius > 0.0)) throw ShapeError("sphere radius must be positive");
        } else if constexpr (std::is_same_v<T, Annulus>) {
          if (!(s.r_inner > 0.0)) throw ShapeError("annulus inner radius must be positive");
          if (!(s.r_outer > s.r_inner)) throw ShapeError("annulus needs r_inner < r_outer");
        } else {
          if (!(s.first.radius > 0.0 && s.second.radius > 0.0)) {
            throw ShapeError("sphere radii must be positive");
          }
        }
      },
      shape);
}

void check_shape_margin(const Shape& shape, const Grid& grid, double epsilon) {
  validate_shape(shape);
  const double margin = 4.0 * epsilon;
  auto require = [&](const Point& c, double r) {
    if (ball_clearance(c, r, grid) < margin) {
      throw MarginError("shape lies within 4*epsilon of the box boundary");
    }
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          require(s.center, s.radius);
        } else if constexpr (std::is_same_v<T, Annulus>) {
          require(s.center, s.r_outer);
        } else {
          require(s.first.center, s.first.radius);
          require(s.second.center, s.second.radius);
          const double gap = distance(s.first.center, s.second.center, grid.dim()) -
                             s.first.radius - s.second.radius;
          if (gap < 8.0 * epsilon) {
            throw ShapeError("spheres of a union must be at least 8*epsilon apart");
          }
        }
      },
      shape);
}

double smooth_saturate_cap(double epsilon) {
  const double inner = 0.5 * std::numbers::pi * epsilon;
  const double outer = 3.0 * epsilon;
  return inner + 0.5 * (outer - inner);
}

double smooth_saturate(double r, double epsilon) {
  const double inner = 0.5 * std::numbers::pi * epsilon;
  const double outer = 3.0 * epsilon;
  const double x = std::abs(r);
  if (x <= inner) return r;
  const double sign = r < 0.0 ? -1.0 : 1.0;
  if (x >= outer) return sign * smooth_saturate_cap(epsilon);
  // Hermite data (inner, inner, slope 1) -> (outer, cap, slope 0); with
  // cap = inner + L/2 the cubic coefficient vanishes.
  const double length = outer - inner;
  const double u = x - inner;
  return sign * (inner + u - 0.5 * u * u / length);
}

ScalarField build_initial_field(const Grid& grid, const Shape& shape, double epsilon,
                                std::optional<double> delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  check_shape_margin(shape, grid, epsilon);
  const Potential potential(delta);
  const double saturated = potential.saturation();
  const double band = 3.0 * epsilon;
  ScalarField field(grid);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double r = signed_distance(shape, grid.position(static_cast<std::size_t>(i)), grid.dim());
    double value;
    if (r >= band) {
      value = saturated;
    } else if (r <= -band) {
      value = -saturated;
    } else {
      value = potential.profile(smooth_saturate(r, epsilon), epsilon);
    }
    field.values[static_cast<std::size_t>(i)] = value;
  }
  return field;
}

}  // namespace obstacle_mcf
