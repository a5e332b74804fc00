#include "obstacle_mcf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "obstacle_mcf/errors.hpp"
#include "obstacle_mcf/measures.hpp"

namespace obstacle_mcf {

namespace {

constexpr double kAutoFactor = 0.9;

/// Start offsets of one line along the last active axis and of its mirrored
/// neighbour lines along the remaining axes.
struct LineNeighbors {
  std::size_t base = 0;
  std::array<std::size_t, 4> others{};
  int count = 0;
};

LineNeighbors line_neighbors(const Grid& g, std::size_t line) {
  LineNeighbors ln;
  const int d = g.dim();
  Index3 idx{0, 0, 0};
  if (d == 3) {
    idx[0] = line / g.nodes(1);
    idx[1] = line % g.nodes(1);
  } else if (d == 2) {
    idx[0] = line;
  }
  ln.base = idx[0] * g.stride(0) + idx[1] * g.stride(1);
  for (int a = 0; a < d - 1; ++a) {
    for (int off : {-1, 1}) {
      Index3 nb = idx;
      nb[a] = reflected_index(idx[a], g.nodes(a), off);
      ln.others[ln.count++] = nb[0] * g.stride(0) + nb[1] * g.stride(1);
    }
  }
  return ln;
}

/// Unscaled Laplacian along one line into `out`. Every axis contributes
/// (u_minus + u_plus) - 2u and the axis terms are added in axis order, so a
/// transposed or mirrored field gives a bitwise transposed or mirrored result.
void line_laplacian(const double* u, const LineNeighbors& ln, std::size_t n, double* out) {
  const double* c = u + ln.base;
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (int k = 0; k + 1 < ln.count; k += 2) {
    const double* m = u + ln.others[k];
    const double* p = u + ln.others[k + 1];
    for (std::size_t j = 0; j < n; ++j) out[j] += (m[j] + p[j]) - 2.0 * c[j];
  }
  out[0] += (c[1] + c[1]) - 2.0 * c[0];
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] += (c[j - 1] + c[j + 1]) - 2.0 * c[j];
  out[n - 1] += (c[n - 2] + c[n - 2]) - 2.0 * c[n - 1];
}

struct LineTotals {
  double dissipation = 0.0;
  double lambda = 0.0;
  double sup = 0.0;
};

/// One explicit step of either scheme from `in` to `out`. Reductions are
/// accumulated per line and combined pairwise, independent of threading.
StepStats advance_field(const Grid& g, const double* in, double* out, double dt, double epsilon,
                        const Potential& potential, Scheme scheme, double* sup_out) {
  const std::size_t lines = g.line_count();
  const std::size_t n = g.line_length();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  std::vector<double> diss(lines, 0.0);
  std::vector<double> lam(lines, 0.0);
  std::vector<double> sup(lines, 0.0);

#pragma omp parallel
  {
    std::vector<double> lap(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(lines); ++li) {
      const auto line = static_cast<std::size_t>(li);
      const LineNeighbors ln = line_neighbors(g, line);
      line_laplacian(in, ln, n, lap.data());
      const double* u = in + ln.base;
      double* w = out + ln.base;
      LineTotals tot;
      if (scheme == Scheme::yosida) {
        for (std::size_t j = 0; j < n; ++j) {
          const double v = lap[j] * inv_h2 - potential.derivative(u[j]) * inv_eps2;
          w[j] = u[j] + dt * v;
          tot.dissipation += v * v;
          tot.sup = std::max(tot.sup, std::abs(w[j]));
        }
      } else {
        for (std::size_t j = 0; j < n; ++j) {
          const double star = u[j] + dt * (lap[j] * inv_h2 + u[j] * inv_eps2);
          const double projected = std::clamp(star, -1.0, 1.0);
          const double v = (projected - u[j]) / dt;
          w[j] = projected;
          tot.dissipation += v * v;
          tot.lambda += std::abs(star - projected);
          tot.sup = std::max(tot.sup, std::abs(projected));
        }
      }
      diss[line] = tot.dissipation;
      lam[line] = tot.lambda;
      sup[line] = tot.sup;
    }
  }
  StepStats stats;
  stats.dissipation = dt * g.cell_volume() * epsilon * pairwise_sum(diss);
  stats.lambda_mass = g.cell_volume() * epsilon * epsilon / dt * pairwise_sum(lam);
  if (sup_out) *sup_out = *std::max_element(sup.begin(), sup.end());
  return stats;
}

void require_stable(const PhaseState& state, double dt) {
  const double limit = stability_limit(state.grid(), state.epsilon, state.delta, state.scheme);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the stability limit " << limit;
    throw StabilityError(os.str());
  }
}

}  // namespace

std::string to_string(Scheme scheme) {
  return scheme == Scheme::yosida ? "yosida" : "projection";
}

Scheme scheme_from_string(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "yosida") return Scheme::yosida;
  if (lower == "projection") return Scheme::projection;
  throw ConfigError("scheme", "must be 'yosida' or 'projection', got '" + name + "'");
}

double stability_limit(const Grid& grid, double epsilon, std::optional<double> delta, Scheme scheme) {
  const double h = grid.h();
  const double diffusion = h * h / (2.0 * grid.dim() + 2.0);
  if (scheme == Scheme::yosida) {
    if (!delta) throw ConfigError("delta", "the yosida scheme requires delta");
    const double stiffness = (1.0 - *delta) / (*delta * epsilon * epsilon);
    const double monotone = 1.0 / (2.0 * grid.dim() / (h * h) + stiffness);
    return std::min({diffusion, 1.0 / stiffness, monotone});
  }
  return std::min(diffusion, 0.5 * epsilon * epsilon);
}

double stability_limit(const SolverConfig& config) {
  return stability_limit(config.grid, config.epsilon, config.delta, config.scheme);
}

void SolverConfig::validate() const {
  if (grid.dim() < 1) throw ConfigError("dim", "grid is not initialised");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
  if (scheme == Scheme::yosida) {
    if (!delta) throw ConfigError("delta", "the yosida scheme requires delta");
    if (!(*delta > 0.0 && *delta < 0.5)) throw ConfigError("delta", "must lie in (0, 1/2)");
  } else if (delta) {
    throw ConfigError("delta", "the projection scheme takes no delta");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", "must be >= 0");
  if (snapshot_every < 1) throw ConfigError("snapshot_every", "must be >= 1");
  if (diagnostics_every < 1) throw ConfigError("diagnostics_every", "must be >= 1");
  if (density_stride < 1) throw ConfigError("density.stride", "must be >= 1");
  if (density_rmax && !(*density_rmax >= 2.0 * grid.h())) {
    throw ConfigError("density.rmax", "must be at least 2h");
  }
  const double limit = stability_limit(*this);
  if (dt) {
    if (!(*dt > 0.0)) throw ConfigError("dt", "must be positive or 'auto'");
    if (*dt > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "exceeds the stability limit " << limit;
      throw ConfigError("dt", os.str());
    }
  }
  if (kernel_time && t_end > 0.0 && *kernel_time - t_end < 2.0 * effective_dt()) {
    throw ConfigError("kernel.s", "must exceed t_end by at least 2 dt");
  }
  try {
    check_shape_margin(shape, grid, epsilon);
  } catch (const ShapeError& e) {
    throw ConfigError("shape", e.what());
  }
}

std::int64_t SolverConfig::step_count() const {
  if (t_end <= 0.0) return 0;
  const double requested = dt ? *dt : kAutoFactor * stability_limit(*this);
  const double steps = std::ceil(t_end / requested * (1.0 - 1e-12));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(steps));
}

double SolverConfig::effective_dt() const {
  const std::int64_t n = step_count();
  if (n == 0) return dt ? *dt : kAutoFactor * stability_limit(*this);
  return t_end / static_cast<double>(n);
}

KernelSpec SolverConfig::kernel() const {
  KernelSpec k;
  if (kernel_center) k.y = *kernel_center;
  k.s = kernel_time ? *kernel_time : t_end + epsilon * epsilon;
  return k;
}

double SolverConfig::density_radius_max() const {
  if (density_rmax) return *density_rmax;
  double e = grid.extent(0);
  for (int a = 1; a < grid.dim(); ++a) e = std::min(e, grid.extent(a));
  return e / 8.0;
}

ScalarField laplacian_h(const ScalarField& field) {
  const Grid& g = field.grid;
  ScalarField out(g);
  const std::size_t n = g.line_length();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  for (std::size_t line = 0; line < g.line_count(); ++line) {
    const LineNeighbors ln = line_neighbors(g, line);
    line_laplacian(field.values.data(), ln, n, out.values.data() + ln.base);
    for (std::size_t j = 0; j < n; ++j) out.values[ln.base + j] *= inv_h2;
  }
  return out;
}

PhaseState step_yosida(const PhaseState& state, double dt) {
  if (state.scheme != Scheme::yosida) throw std::invalid_argument("step_yosida needs a yosida state");
  require_stable(state, dt);
  PhaseState next = state;
  advance_field(state.grid(), state.field.values.data(), next.field.values.data(), dt, state.epsilon,
                state.potential(), Scheme::yosida, nullptr);
  next.t = state.t + dt;
  return next;
}

PhaseState step_projection(const PhaseState& state, double dt) {
  if (state.scheme != Scheme::projection) {
    throw std::invalid_argument("step_projection needs a projection state");
  }
  require_stable(state, dt);
  PhaseState next = state;
  advance_field(state.grid(), state.field.values.data(), next.field.values.data(), dt, state.epsilon,
                Potential(std::nullopt), Scheme::projection, nullptr);
  next.t = state.t + dt;
  return next;
}

Simulation::Simulation(SolverConfig config) : config_(std::move(config)) {
  config_.validate();
  potential_ = config_.potential();
  state_.field = build_initial_field(config_.grid, config_.shape, config_.epsilon, config_.delta);
  state_.epsilon = config_.epsilon;
  state_.delta = config_.delta;
  state_.scheme = config_.scheme;
  state_.t = 0.0;
  scratch_.resize(state_.field.size());
  total_steps_ = config_.step_count();
  dt_ = config_.effective_dt();
}

void Simulation::advance() {
  if (finished()) return;
  double sup = 0.0;
  const StepStats stats = advance_field(config_.grid, state_.field.values.data(), scratch_.data(), dt_,
                                        config_.epsilon, potential_, config_.scheme, &sup);
  std::swap(state_.field.values, scratch_);
  ++step_;
  state_.t = step_ == total_steps_ ? config_.t_end : static_cast<double>(step_) * dt_;
  dissipation_ += stats.dissipation;
  lambda_mass_ = stats.lambda_mass;
  const double bound = 2.0 * potential_.saturation();
  if (!(sup <= bound)) {
    std::ostringstream os;
    os << "sup|phi| = " << sup << " exceeds " << bound << " at t = " << state_.t;
    throw BlowUpError(os.str());
  }
}

void Simulation::check_margin() const {
  const Grid& g = config_.grid;
  const double margin = 4.0 * config_.epsilon;
  const auto& u = state_.field.values;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index3 idx = g.unflatten(i);
    const Point x = g.position(idx);
    if (g.distance_to_boundary(x) >= margin) continue;
    const bool positive = u[i] >= 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      for (int off : {-1, 1}) {
        Index3 nb = idx;
        nb[a] = reflected_index(idx[a], g.nodes(a), off);
        if ((u[g.flatten(nb)] >= 0.0) != positive) {
          std::ostringstream os;
          os << "interface within 4*epsilon of the boundary at t = " << state_.t;
          throw MarginError(os.str());
        }
      }
    }
  }
}

RunOutput run(const SolverConfig& config, const StepObserver& observer) {
  Simulation sim(config);
  const DiagnosticsSettings settings = DiagnosticsSettings::from_config(sim.config());
  RunOutput out;
  auto accumulators = [&sim]() {
    DiagnosticsRecord r;
    r.t = sim.state().t;
    r.dissipation_accum = sim.dissipation_accum();
    r.lambda_mass = sim.lambda_mass();
    return r;
  };
  auto take = [&]() {
    const std::int64_t k = sim.step_index();
    const bool last = sim.finished();
    if (k % config.snapshot_every == 0 || last) {
      sim.check_margin();
      out.snapshots.push_back(sim.state());
      out.snapshot_steps.push_back(k);
      out.snapshot_accumulators.push_back(accumulators());
    }
    if (k % config.diagnostics_every == 0 || last) {
      out.diagnostics.push_back(
          sample_diagnostics(sim.state(), settings, sim.dissipation_accum(), sim.lambda_mass()));
    }
  };
  if (observer) observer(sim);
  take();
  while (!sim.finished()) {
    sim.advance();
    if (observer) observer(sim);
    take();
  }
  return out;
}

}  // namespace obstacle_mcf
