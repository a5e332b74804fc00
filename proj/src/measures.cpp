#include "obstacle_mcf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "obstacle_mcf/errors.hpp"

namespace obstacle_mcf {

namespace {

/// h^n-free sum of fn(flat) over all nodes: sequential within a line,
/// pairwise across lines.
template <class Fn>
double reduce_nodes(const Grid& g, Fn&& fn) {
  const std::size_t lines = g.line_count();
  const std::size_t n = g.line_length();
  std::vector<double> partial(lines, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(lines); ++li) {
    const std::size_t base = static_cast<std::size_t>(li) * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += fn(base + j);
    partial[static_cast<std::size_t>(li)] = s;
  }
  return pairwise_sum(partial);
}

double difference(const std::vector<double>& u, const Grid& g, const Index3& idx, int axis, int off) {
  Index3 nb = idx;
  nb[axis] = reflected_index(idx[axis], g.nodes(axis), off);
  return u[g.flatten(nb)] - u[g.flatten(idx)];
}

/// sum_axes ((D+ u)^2 + (D- u)^2) / 2 at one node.
double gradient_energy(const std::vector<double>& u, const Grid& g, std::size_t flat) {
  const Index3 idx = g.unflatten(flat);
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double p = difference(u, g, idx, a, 1);
    const double m = difference(u, g, idx, a, -1);
    s += 0.5 * (p * p + m * m);
  }
  return s / (g.h() * g.h());
}

Point centred_gradient(const std::vector<double>& u, const Grid& g, std::size_t flat) {
  const Index3 idx = g.unflatten(flat);
  Point grad{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    Index3 p = idx;
    Index3 m = idx;
    p[a] = reflected_index(idx[a], g.nodes(a), 1);
    m[a] = reflected_index(idx[a], g.nodes(a), -1);
    grad[a] = (u[g.flatten(p)] - u[g.flatten(m)]) / (2.0 * g.h());
  }
  return grad;
}

double node_laplacian(const std::vector<double>& u, const Grid& g, std::size_t flat) {
  const Index3 idx = g.unflatten(flat);
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    s += difference(u, g, idx, a, 1) + difference(u, g, idx, a, -1);
  }
  return s / (g.h() * g.h());
}

/// -u_t of the continuous-time dynamics. For the projection scheme this is
/// the minimal-norm element: the reaction pushing out of [-1, 1] at a
/// saturated node is absorbed by the multiplier.
double chemical_rate(const PhaseState& state, const Potential& potential, std::size_t flat) {
  const auto& u = state.field.values;
  const double eps2 = state.epsilon * state.epsilon;
  const double lap = node_laplacian(u, state.grid(), flat);
  if (state.scheme == Scheme::yosida) return -lap + potential.derivative(u[flat]) / eps2;
  const double v = lap + u[flat] / eps2;
  if ((u[flat] >= 1.0 && v > 0.0) || (u[flat] <= -1.0 && v < 0.0)) return 0.0;
  return -v;
}

}  // namespace

TestFunction TestFunction::constant(double c) {
  TestFunction f;
  f.value_ = [c](const Point&) { return c; };
  f.gradient_ = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  f.support_ = [](const Point&) { return true; };
  f.hessian_bound_ = 0.0;
  return f;
}

TestFunction TestFunction::bump(const Point& center, double radius, int dim) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  const double r2 = radius * radius;
  auto scaled = [center, r2, dim](const Point& x) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
    return s / r2;
  };
  TestFunction f;
  f.value_ = [scaled](const Point& x) {
    const double s = scaled(x);
    if (s >= 1.0) return 0.0;
    const double w = 1.0 - s;
    return w * w * w;
  };
  f.gradient_ = [scaled, center, r2, dim](const Point& x) {
    Point g{0.0, 0.0, 0.0};
    const double s = scaled(x);
    if (s >= 1.0) return g;
    const double w = 1.0 - s;
    for (int a = 0; a < dim; ++a) g[a] = -6.0 * w * w * (x[a] - center[a]) / r2;
    return g;
  };
  f.support_ = [scaled](const Point& x) { return scaled(x) < 1.0; };
  f.hessian_bound_ = 6.0 / r2;
  return f;
}

ScalarField energy_density(const PhaseState& state) {
  const Grid& g = state.grid();
  const Potential potential = state.potential();
  const double eps = state.epsilon;
  ScalarField e(g);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    e.values[k] = 0.5 * eps * gradient_energy(state.field.values, g, k) +
                  potential.value(state.field.values[k]) / eps;
  }
  return e;
}

ScalarField discrepancy_density(const PhaseState& state) {
  const Grid& g = state.grid();
  const Potential potential = state.potential();
  const double eps = state.epsilon;
  ScalarField xi(g);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    xi.values[k] = 0.5 * eps * gradient_energy(state.field.values, g, k) -
                   potential.value(state.field.values[k]) / eps;
  }
  return xi;
}

double energy_measure(const PhaseState& state, const TestFunction& testfn) {
  const ScalarField e = energy_density(state);
  const Grid& g = state.grid();
  return g.cell_volume() *
         reduce_nodes(g, [&](std::size_t k) { return testfn.value(g.position(k)) * e.values[k]; });
}

double energy_measure(const PhaseState& state) {
  const ScalarField e = energy_density(state);
  return state.grid().cell_volume() * reduce_nodes(state.grid(), [&](std::size_t k) { return e.values[k]; });
}

double energy_on_support(const PhaseState& state, const TestFunction& testfn) {
  const ScalarField e = energy_density(state);
  const Grid& g = state.grid();
  return g.cell_volume() * reduce_nodes(g, [&](std::size_t k) {
           return testfn.in_support(g.position(k)) ? e.values[k] : 0.0;
         });
}

DiscrepancyResult discrepancy_measure(const PhaseState& state) {
  DiscrepancyResult r;
  r.field = discrepancy_density(state);
  r.xi_sup = *std::max_element(r.field.values.begin(), r.field.values.end());
  r.xi_mass = state.grid().cell_volume() *
              reduce_nodes(state.grid(), [&](std::size_t k) { return std::abs(r.field.values[k]); });
  return r;
}

double backward_heat_kernel(const KernelSpec& kernel, const Point& x, double t, int dim) {
  const double tau = kernel.s - t;
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += (x[a] - kernel.y[a]) * (x[a] - kernel.y[a]);
  return std::pow(4.0 * std::numbers::pi * tau, -0.5 * (dim - 1)) * std::exp(-r2 / (4.0 * tau));
}

namespace {

double huisken_from_energy(const ScalarField& e, const KernelSpec& kernel, double t) {
  const Grid& g = e.grid;
  return g.cell_volume() * reduce_nodes(g, [&](std::size_t k) {
           return backward_heat_kernel(kernel, g.position(k), t, g.dim()) * e.values[k];
         });
}

void require_kernel_gap(const KernelSpec& kernel, double t, double dt) {
  if (kernel.s - t < 2.0 * dt) {
    std::ostringstream os;
    os << "kernel time s = " << kernel.s << " is closer than 2 dt to t = " << t;
    throw KernelTooCloseError(os.str());
  }
}

}  // namespace

double huisken_functional(const PhaseState& state, const KernelSpec& kernel, double dt) {
  require_kernel_gap(kernel, state.t, dt);
  return huisken_from_energy(energy_density(state), kernel, state.t);
}

std::vector<double> dyadic_radii(double h, double r_max) {
  std::vector<double> radii;
  for (double r = 2.0 * h; r <= r_max * (1.0 + 1e-12); r *= 2.0) radii.push_back(r);
  return radii;
}

double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double density_ratio_scan(const PhaseState& state, std::int64_t stride, std::span<const double> radii) {
  return density_ratio_scan(energy_density(state), stride, radii);
}

double density_ratio_scan(const ScalarField& energy, std::int64_t stride, std::span<const double> radii) {
  const Grid& g = energy.grid;
  if (radii.empty()) return 0.0;
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end());
  for (double r : sorted) {
    if (r < 2.0 * g.h() * (1.0 - 1e-12)) throw std::invalid_argument("radii must be >= 2h");
  }
  const int d = g.dim();
  // Integer offsets inside the largest ball, ordered by distance.
  const double reach = sorted.back() / g.h() * (1.0 + 1e-12);
  const auto m = static_cast<long>(std::floor(reach));
  struct Offset {
    std::array<long, 3> o;
    long r2;
  };
  std::vector<Offset> offsets;
  const long m1 = d >= 2 ? m : 0;
  const long m2 = d >= 3 ? m : 0;
  for (long a = -m; a <= m; ++a)
    for (long b = -m1; b <= m1; ++b)
      for (long c = -m2; c <= m2; ++c) {
        const long r2 = a * a + b * b + c * c;
        if (static_cast<double>(r2) <= reach * reach) offsets.push_back({{a, b, c}, r2});
      }
  std::stable_sort(offsets.begin(), offsets.end(),
                   [](const Offset& x, const Offset& y) { return x.r2 < y.r2; });
  // cut[k]: number of offsets inside radius k.
  std::vector<std::size_t> cut(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double lim = sorted[k] / g.h() * (1.0 + 1e-12);
    cut[k] = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), lim * lim,
                         [](double v, const Offset& o) { return v < static_cast<double>(o.r2); }) -
        offsets.begin());
  }
  std::vector<double> norm(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    norm[k] = g.cell_volume() / (unit_ball_volume(d - 1) * std::pow(sorted[k], d - 1));
  }

  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index3 idx = g.unflatten(i);
    bool keep = true;
    for (int a = 0; a < d; ++a) keep = keep && (idx[a] % static_cast<std::size_t>(stride) == 0);
    if (keep) centers.push_back(i);
  }

  double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(centers.size()); ++ci) {
    const Index3 c = g.unflatten(centers[static_cast<std::size_t>(ci)]);
    double acc = 0.0;
    std::size_t next = 0;
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      while (next < cut.size() && cut[next] == j) {
        best = std::max(best, acc * norm[next]);
        ++next;
      }
      bool inside = true;
      Index3 p{};
      for (int a = 0; a < 3; ++a) {
        const long v = static_cast<long>(c[a]) + offsets[j].o[a];
        inside = inside && v >= 0 && v < static_cast<long>(g.nodes(a));
        p[a] = static_cast<std::size_t>(std::max(0L, v));
      }
      if (inside) acc += energy.values[g.flatten(p)];
    }
    while (next < cut.size()) {
      best = std::max(best, acc * norm[next]);
      ++next;
    }
  }
  return best;
}

DiagnosticsSettings DiagnosticsSettings::from_config(const SolverConfig& config) {
  DiagnosticsSettings s;
  s.kernel = config.kernel();
  s.dt = config.effective_dt();
  s.density_stride = config.density_stride;
  s.radii = dyadic_radii(config.grid.h(), config.density_radius_max());
  return s;
}

DiagnosticsRecord sample_diagnostics(const PhaseState& state, const DiagnosticsSettings& settings,
                                     double dissipation_accum, double lambda_mass) {
  const Grid& g = state.grid();
  const Potential potential = state.potential();
  const double eps = state.epsilon;
  const auto& u = state.field.values;
  require_kernel_gap(settings.kernel, state.t, settings.dt);

  ScalarField e(g);
  ScalarField xi(g);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double grad = 0.5 * eps * gradient_energy(u, g, k);
    const double pot = potential.value(u[k]) / eps;
    e.values[k] = grad + pot;
    xi.values[k] = grad - pot;
  }
  DiagnosticsRecord r;
  r.t = state.t;
  r.total_energy = g.cell_volume() * reduce_nodes(g, [&](std::size_t k) { return e.values[k]; });
  r.xi_sup = *std::max_element(xi.values.begin(), xi.values.end());
  r.xi_mass = g.cell_volume() * reduce_nodes(g, [&](std::size_t k) { return std::abs(xi.values[k]); });
  r.huisken = huisken_from_energy(e, settings.kernel, state.t);
  r.density_ratio_max = density_ratio_scan(e, settings.density_stride, settings.radii);
  r.dissipation_accum = dissipation_accum;
  r.lambda_mass = lambda_mass;
  return r;
}

double dissipation_check(std::span<const DiagnosticsRecord> records) {
  if (records.empty()) throw std::invalid_argument("dissipation_check needs at least one record");
  const DiagnosticsRecord& first = records.front();
  const DiagnosticsRecord& last = records.back();
  const double defect = last.total_energy + (last.dissipation_accum - first.dissipation_accum) -
                        first.total_energy;
  if (first.total_energy == 0.0) return std::abs(defect);
  return std::abs(defect) / first.total_energy;
}

LocalizedMonotonicity localized_monotonicity_check(std::span<const PhaseState> samples,
                                                   const TestFunction& testfn) {
  LocalizedMonotonicity out;
  if (samples.empty()) return out;
  std::vector<double> mu(samples.size());
  double support_max = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    mu[i] = energy_measure(samples[i], testfn);
    support_max = std::max(support_max, energy_on_support(samples[i], testfn));
  }
  out.c5 = testfn.hessian_bound() * support_max;
  double running_min = std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = mu[i] - out.c5 * samples[i].t;
    if (i > 0) worst = std::max(worst, f - running_min);
    running_min = std::min(running_min, f);
  }
  out.worst_violation = samples.size() > 1 ? worst : 0.0;
  return out;
}

double brakke_functional(const PhaseState& state, const TestFunction& testfn) {
  const Grid& g = state.grid();
  const Potential potential = state.potential();
  const double eps = state.epsilon;
  const auto& u = state.field.values;
  return g.cell_volume() * reduce_nodes(g, [&](std::size_t k) {
           const Point x = g.position(k);
           const double w = chemical_rate(state, potential, k);
           const Point gt = testfn.gradient(x);
           const Point gu = centred_gradient(u, g, k);
           double dot = 0.0;
           for (int a = 0; a < g.dim(); ++a) dot += gt[a] * gu[a];
           return -eps * testfn.value(x) * w * w + eps * dot * w;
         });
}

std::vector<XiStudyRow> xi_vanishing_study(std::span<const XiStudyInput> runs, double t_lo, double t_hi) {
  std::vector<XiStudyRow> rows;
  for (const auto& run : runs) {
    XiStudyRow row;
    row.epsilon = run.epsilon;
    for (const auto& rec : run.diagnostics) {
      if (rec.t >= t_lo && rec.t <= t_hi) row.max_xi_mass = std::max(row.max_xi_mass, rec.xi_mass);
    }
    rows.push_back(row);
  }
  return rows;
}

BvHolderResult bv_holder_check(std::span<const PhaseState> snapshots) {
  BvHolderResult out;
  if (snapshots.empty()) return out;
  const LevelTransform transform(snapshots.front().potential());
  std::vector<std::vector<double>> levels;
  levels.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    const Grid& g = snap.grid();
    std::vector<double> w(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) w[k] = transform(snap.field.values[k]);
    const double bv = g.cell_volume() *
                      reduce_nodes(g, [&](std::size_t k) { return std::sqrt(gradient_energy(w, g, k)); });
    out.bv_max = std::max(out.bv_max, bv);
    levels.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    for (std::size_t j = i + 1; j < snapshots.size(); ++j) {
      const double gap = snapshots[j].t - snapshots[i].t;
      if (!(gap > 0.0)) continue;
      const Grid& g = snapshots[i].grid();
      const double l1 = g.cell_volume() * reduce_nodes(g, [&](std::size_t k) {
                          return std::abs(levels[j][k] - levels[i][k]);
                        });
      out.holder_max = std::max(out.holder_max, l1 / std::sqrt(gap));
    }
  }
  return out;
}

}  // namespace obstacle_mcf
