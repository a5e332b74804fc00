#include "obstacle_mcf/mcf_oracle.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "marching_tables.hpp"
#include "obstacle_mcf/errors.hpp"

namespace obstacle_mcf {

double sphere_extinction_time(double r0, int n) {
  if (n < 2) throw std::invalid_argument("mean curvature flow needs n >= 2");
  return r0 * r0 / (2.0 * (n - 1));
}

double sphere_radius_exact(double r0, int n, double t) {
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  if (t >= sphere_extinction_time(r0, n)) {
    std::ostringstream os;
    os << "sphere of radius " << r0 << " in dimension " << n << " is extinct at t = " << t;
    throw ExtinctError(os.str());
  }
  return std::sqrt(r0 * r0 - 2.0 * (n - 1) * t);
}

namespace {

inline bool negative(double v) { return v < 0.0; }

class VertexBuilder {
 public:
  VertexBuilder(const ScalarField& field, Contour& out) : f_(field), out_(out) {}

  // Vertex on the edge from node `idx` one step along `axis`.
  std::size_t on_edge(const Index3& idx, int axis) {
    const Grid& g = f_.grid;
    const std::size_t a = g.flatten(idx);
    const std::size_t key = a * 3 + static_cast<std::size_t>(axis);
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    Index3 nb = idx;
    nb[axis] += 1;
    const std::size_t b = g.flatten(nb);
    const double ua = f_.values[a];
    const double ub = f_.values[b];
    const double s = ua / (ua - ub);
    Point p = g.position(idx);
    p[axis] += s * g.h();
    const std::size_t id = out_.vertices.size();
    out_.vertices.push_back(p);
    ids_.emplace(key, id);
    return id;
  }

 private:
  const ScalarField& f_;
  Contour& out_;
  std::unordered_map<std::size_t, std::size_t> ids_;
};

void march_1d(const ScalarField& f, Contour& out) {
  VertexBuilder vb(f, out);
  for (std::size_t i = 0; i + 1 < f.grid.nodes(0); ++i) {
    if (negative(f.values[i]) != negative(f.values[i + 1])) vb.on_edge({i, 0, 0}, 0);
  }
}

void march_squares(const ScalarField& f, Contour& out) {
  const Grid& g = f.grid;
  VertexBuilder vb(f, out);
  // Corners counter-clockwise; edge k joins corner k and corner k+1.
  static constexpr int corner[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (std::size_t i = 0; i + 1 < g.nodes(0); ++i) {
    for (std::size_t j = 0; j + 1 < g.nodes(1); ++j) {
      double v[4];
      bool neg[4];
      for (int k = 0; k < 4; ++k) {
        v[k] = f.values[g.flatten({i + corner[k][0], j + corner[k][1], 0})];
        neg[k] = negative(v[k]);
      }
      std::size_t id[4];
      int crossed = 0;
      for (int k = 0; k < 4; ++k) {
        const int l = (k + 1) % 4;
        if (neg[k] == neg[l]) continue;
        ++crossed;
        // Edges 0 and 2 run along axis 0, edges 1 and 3 along axis 1.
        const int axis = (k % 2 == 0) ? 0 : 1;
        const int base = (k < 2) ? k : l;
        id[k] = vb.on_edge({i + corner[base][0], j + corner[base][1], 0}, axis);
      }
      if (crossed == 2) {
        std::size_t ends[2];
        int n = 0;
        for (int k = 0; k < 4; ++k) {
          if (neg[k] != neg[(k + 1) % 4]) ends[n++] = id[k];
        }
        out.segments.push_back({ends[0], ends[1]});
      } else if (crossed == 4) {
        // Saddle: cut off the corners whose sign differs from the centre.
        const bool centre_neg = negative(0.25 * (v[0] + v[1] + v[2] + v[3]));
        for (int k = 0; k < 4; ++k) {
          if (neg[k] != centre_neg) out.segments.push_back({id[(k + 3) % 4], id[k]});
        }
      }
    }
  }
}

void march_cubes(const ScalarField& f, Contour& out) {
  const Grid& g = f.grid;
  VertexBuilder vb(f, out);
  using detail::kCorner;
  using detail::kEdgeCorners;
  for (std::size_t i = 0; i + 1 < g.nodes(0); ++i) {
    for (std::size_t j = 0; j + 1 < g.nodes(1); ++j) {
      for (std::size_t k = 0; k + 1 < g.nodes(2); ++k) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          const Index3 idx{i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]};
          if (negative(f.values[g.flatten(idx)])) cube |= 1 << c;
        }
        if (cube == 0 || cube == 255) continue;
        const int* tri = detail::kTriTable[cube];
        for (int t = 0; tri[t] != -1; t += 3) {
          std::array<std::size_t, 3> face{};
          for (int e = 0; e < 3; ++e) {
            const int* ends = kEdgeCorners[tri[t + e]];
            const int* c0 = kCorner[ends[0]];
            const int* c1 = kCorner[ends[1]];
            int axis = 0;
            while (c0[axis] == c1[axis]) ++axis;
            const int* lo = c0[axis] < c1[axis] ? c0 : c1;
            face[e] = vb.on_edge({i + lo[0], j + lo[1], k + lo[2]}, axis);
          }
          out.triangles.push_back(face);
        }
      }
    }
  }
}

}  // namespace

Contour extract_zero_level(const ScalarField& field) {
  Contour out;
  out.dim = field.grid.dim();
  switch (out.dim) {
    case 1: march_1d(field, out); break;
    case 2: march_squares(field, out); break;
    default: march_cubes(field, out); break;
  }
  if (out.empty()) throw EmptyContourError("field does not change sign");
  return out;
}

Contour extract_zero_level(const PhaseState& state) { return extract_zero_level(state.field); }

namespace {

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

RadiusEstimate radius_estimate(const Contour& contour, const Point& center) {
  if (contour.empty()) throw EmptyContourError("empty contour");
  RadiusEstimate r;
  double sum = 0.0;
  for (const auto& v : contour.vertices) sum += distance(v, center, contour.dim);
  r.mean = sum / static_cast<double>(contour.vertices.size());
  for (const auto& v : contour.vertices) {
    r.max_deviation = std::max(r.max_deviation, std::abs(distance(v, center, contour.dim) - r.mean));
  }
  return r;
}

double hausdorff_distance(const Contour& contour, const Point& center, double radius) {
  if (contour.empty()) throw EmptyContourError("empty contour");
  double worst = 0.0;
  for (const auto& v : contour.vertices) {
    worst = std::max(worst, std::abs(distance(v, center, contour.dim) - radius));
  }
  return worst;
}

void write_contour_csv(const Contour& contour, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os << std::setprecision(17);
  for (int a = 0; a < contour.dim; ++a) os << (a ? ",x" : "x") << a + 1;
  os << '\n';
  for (const auto& v : contour.vertices) {
    for (int a = 0; a < contour.dim; ++a) os << (a ? "," : "") << v[a];
    os << '\n';
  }
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace obstacle_mcf
