#include "obstacle_mcf/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "obstacle_mcf/errors.hpp"

namespace obstacle_mcf {

namespace {

const std::set<std::string> kKnownKeys = {
    "dim",          "nodes",         "extent",         "shape.kind",     "shape.center",
    "shape.radius", "shape.r_inner", "shape.r_outer",  "shape.center2",  "shape.radius2",
    "epsilon",      "delta",         "scheme",         "dt",             "t_end",
    "snapshot_every", "diagnostics_every", "output_dir", "kernel.center", "kernel.s",
    "density.stride", "density.rmax"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key, "'" + text + "' is not a number");
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key, "'" + text + "' is not an integer");
  return v;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

class Entries {
 public:
  explicit Entries(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  const std::string& raw(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(key, "missing required key");
    used_.insert(key);
    return it->second;
  }

  double number(const std::string& key) { return to_double(key, raw(key)); }
  std::int64_t integer(const std::string& key) { return to_int(key, raw(key)); }

  /// One value repeated on every axis, or exactly `dim` values.
  std::vector<double> numbers(const std::string& key, int dim) {
    const auto parts = split(raw(key));
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(to_double(key, p));
    if (out.size() == 1 && dim > 1) out.assign(static_cast<std::size_t>(dim), out[0]);
    if (static_cast<int>(out.size()) != dim) {
      throw ConfigError(key, "expected 1 or " + std::to_string(dim) + " values");
    }
    return out;
  }

  Point point(const std::string& key, int dim) {
    const auto parts = split(raw(key));
    if (static_cast<int>(parts.size()) != dim) {
      throw ConfigError(key, "expected " + std::to_string(dim) + " coordinates");
    }
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) p[a] = to_double(key, parts[static_cast<std::size_t>(a)]);
    return p;
  }

  void require_all_used() const {
    for (const auto& [key, value] : kv_) {
      if (!used_.count(key)) throw ConfigError(key, "not used by this configuration");
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

Shape parse_shape(Entries& e, int dim) {
  const std::string kind = e.raw("shape.kind");
  if (kind == "sphere") {
    return Sphere{e.point("shape.center", dim), e.number("shape.radius")};
  }
  if (kind == "annulus") {
    return Annulus{e.point("shape.center", dim), e.number("shape.r_inner"), e.number("shape.r_outer")};
  }
  if (kind == "union") {
    return SphereUnion{Sphere{e.point("shape.center", dim), e.number("shape.radius")},
                       Sphere{e.point("shape.center2", dim), e.number("shape.radius2")}};
  }
  throw ConfigError("shape.kind", "must be sphere, annulus or union, got '" + kind + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(const Point& p, int dim) {
  std::string s;
  for (int a = 0; a < dim; ++a) s += (a ? "," : "") + fmt(p[a]);
  return s;
}

}  // namespace

SolverConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key)) throw ConfigError(key, "unknown key");
    if (value.empty()) throw ConfigError(key, "empty value");
    if (!kv.emplace(key, value).second) throw ConfigError(key, "given more than once");
  }

  Entries e(std::move(kv));
  SolverConfig c;
  const auto dim = e.integer("dim");
  if (dim < 1 || dim > 3) throw ConfigError("dim", "must be 1, 2 or 3");
  const int d = static_cast<int>(dim);

  std::vector<std::size_t> nodes;
  for (double v : e.numbers("nodes", d)) {
    if (v != std::floor(v) || v < static_cast<double>(Grid::kMinNodes)) {
      throw ConfigError("nodes", "must be integers >= " + std::to_string(Grid::kMinNodes));
    }
    nodes.push_back(static_cast<std::size_t>(v));
  }
  const std::vector<double> extent = e.numbers("extent", d);
  for (double v : extent) {
    if (!(v > 0.0)) throw ConfigError("extent", "must be positive");
  }
  try {
    c.grid = Grid(d, nodes, extent);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("nodes", ex.what());
  }

  c.shape = parse_shape(e, d);
  c.epsilon = e.number("epsilon");
  if (e.has("delta")) c.delta = e.number("delta");
  c.scheme = scheme_from_string(e.raw("scheme"));
  if (e.has("dt")) {
    const std::string dt = e.raw("dt");
    if (dt != "auto") c.dt = to_double("dt", dt);
  }
  c.t_end = e.number("t_end");
  if (e.has("snapshot_every")) c.snapshot_every = e.integer("snapshot_every");
  if (e.has("diagnostics_every")) c.diagnostics_every = e.integer("diagnostics_every");
  if (e.has("output_dir")) c.output_dir = e.raw("output_dir");
  if (e.has("kernel.center")) c.kernel_center = e.point("kernel.center", d);
  if (e.has("kernel.s")) c.kernel_time = e.number("kernel.s");
  if (e.has("density.stride")) c.density_stride = e.integer("density.stride");
  if (e.has("density.rmax")) c.density_rmax = e.number("density.rmax");
  e.require_all_used();
  c.validate();
  return c;
}

SolverConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const SolverConfig& c) {
  const Grid& g = c.grid;
  const int d = g.dim();
  std::ostringstream os;
  os << "dim = " << d << '\n';
  os << "nodes = ";
  for (int a = 0; a < d; ++a) os << (a ? "," : "") << g.nodes(a);
  os << '\n';
  os << "extent = ";
  for (int a = 0; a < d; ++a) os << (a ? "," : "") << fmt(g.extent(a));
  os << '\n';
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          os << "shape.kind = sphere\nshape.center = " << fmt_point(s.center, d)
             << "\nshape.radius = " << fmt(s.radius) << '\n';
        } else if constexpr (std::is_same_v<T, Annulus>) {
          os << "shape.kind = annulus\nshape.center = " << fmt_point(s.center, d)
             << "\nshape.r_inner = " << fmt(s.r_inner) << "\nshape.r_outer = " << fmt(s.r_outer) << '\n';
        } else {
          os << "shape.kind = union\nshape.center = " << fmt_point(s.first.center, d)
             << "\nshape.radius = " << fmt(s.first.radius) << "\nshape.center2 = "
             << fmt_point(s.second.center, d) << "\nshape.radius2 = " << fmt(s.second.radius) << '\n';
        }
      },
      c.shape);
  os << "epsilon = " << fmt(c.epsilon) << '\n';
  if (c.delta) os << "delta = " << fmt(*c.delta) << '\n';
  os << "scheme = " << to_string(c.scheme) << '\n';
  os << "dt = " << (c.dt ? fmt(*c.dt) : std::string("auto")) << '\n';
  os << "t_end = " << fmt(c.t_end) << '\n';
  os << "snapshot_every = " << c.snapshot_every << '\n';
  os << "diagnostics_every = " << c.diagnostics_every << '\n';
  os << "output_dir = " << c.output_dir << '\n';
  if (c.kernel_center) os << "kernel.center = " << fmt_point(*c.kernel_center, d) << '\n';
  if (c.kernel_time) os << "kernel.s = " << fmt(*c.kernel_time) << '\n';
  os << "density.stride = " << c.density_stride << '\n';
  if (c.density_rmax) os << "density.rmax = " << fmt(*c.density_rmax) << '\n';
  return os.str();
}

}  // namespace obstacle_mcf
