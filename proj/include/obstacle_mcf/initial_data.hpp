#pragma once

#include <optional>
#include <variant>

#include "obstacle_mcf/grid.hpp"

namespace obstacle_mcf {

struct Sphere {
  Point center{0.0, 0.0, 0.0};
  double radius = 0.0;

  bool operator==(const Sphere&) const = default;
};

/// The shell r_inner < |x - center| < r_outer.
struct Annulus {
  Point center{0.0, 0.0, 0.0};
  double r_inner = 0.0;
  double r_outer = 0.0;

  bool operator==(const Annulus&) const = default;
};

struct SphereUnion {
  Sphere first;
  Sphere second;

  bool operator==(const SphereUnion&) const = default;
};

/// Model hypersurface bounding the initial positive phase.
using Shape = std::variant<Sphere, Annulus, SphereUnion>;

/// Signed distance to the shape boundary, positive inside. Only the first
/// `dim` coordinates of `x` are used.
double signed_distance(const Shape& shape, const Point& x, int dim);

/// Throws ShapeError on non-positive radii or an inverted annulus.
void validate_shape(const Shape& shape);

/// Throws MarginError when any part of the shape lies within 4*epsilon of
/// a face of the box, and ShapeError when the two spheres of a union are
/// closer than 8*epsilon.
void check_shape_margin(const Shape& shape, const Grid& grid, double epsilon);

/// Smoothed signed distance. Identity for |r| <= eps*pi/2; a Hermite blend
/// with end slopes 1 and 0 reaches the constant cap at |r| = 3*eps. The cap
/// is chosen so the blend is quadratic, giving |r''| = 1/((3 - pi/2) eps).
double smooth_saturate(double r, double epsilon);
/// Cap value of smooth_saturate.
double smooth_saturate_cap(double epsilon);

/// Well-prepared initial phase: profile(smooth_saturate(signed_distance)).
/// Nodes with |signed distance| >= 3*eps are set to the saturated value
/// exactly. `delta` absent selects the limit profile.
ScalarField build_initial_field(const Grid& grid, const Shape& shape, double epsilon,
                                std::optional<double> delta);

}  // namespace obstacle_mcf
