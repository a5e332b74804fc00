#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "obstacle_mcf/grid.hpp"
#include "obstacle_mcf/solver.hpp"

namespace obstacle_mcf {

/// Radius of a sphere moving by mean curvature: sqrt(r0^2 - 2(n-1)t).
/// Throws ExtinctError once t reaches the extinction time.
double sphere_radius_exact(double r0, int n, double t);
double sphere_extinction_time(double r0, int n);

/// Piecewise-linear approximation of {phi = 0}. Every vertex sits on a grid
/// edge whose end values bracket zero; one vertex per crossed edge.
struct Contour {
  int dim = 0;
  std::vector<Point> vertices;
  std::vector<std::array<std::size_t, 2>> segments;   // 2-D
  std::vector<std::array<std::size_t, 3>> triangles;  // 3-D

  bool empty() const noexcept { return vertices.empty(); }
};

/// Marching squares (2-D) or marching cubes (3-D). Nodes equal to zero
/// count as positive. Throws EmptyContourError when the field does not
/// change sign.
Contour extract_zero_level(const ScalarField& field);
Contour extract_zero_level(const PhaseState& state);

struct RadiusEstimate {
  double mean = 0.0;
  double max_deviation = 0.0;  ///< max | |v - c| - mean |
};
RadiusEstimate radius_estimate(const Contour& contour, const Point& center);

/// max over vertices of | |v - center| - r |.
double hausdorff_distance(const Contour& contour, const Point& center, double radius);

/// One vertex per row, coordinates x1,...,xn, full precision.
void write_contour_csv(const Contour& contour, const std::string& path);

}  // namespace obstacle_mcf
