#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "obstacle_mcf/grid.hpp"
#include "obstacle_mcf/initial_data.hpp"
#include "obstacle_mcf/potential.hpp"

namespace obstacle_mcf {

enum class Scheme { yosida, projection };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Snapshot of the evolution.
struct PhaseState {
  ScalarField field;
  double epsilon = 0.0;
  std::optional<double> delta;  ///< present iff scheme == yosida
  double t = 0.0;
  Scheme scheme = Scheme::yosida;

  const Grid& grid() const noexcept { return field.grid; }
  Potential potential() const { return Potential(delta); }
};

/// Backward heat kernel anchor (y, s).
struct KernelSpec {
  Point y{0.0, 0.0, 0.0};
  double s = 0.0;
};

struct SolverConfig {
  Grid grid;
  Shape shape;
  double epsilon = 0.0;
  std::optional<double> delta;
  Scheme scheme = Scheme::yosida;
  std::optional<double> dt;  ///< absent means "auto" (0.9 * stability_limit)
  double t_end = 0.0;
  std::int64_t snapshot_every = 1;
  std::int64_t diagnostics_every = 1;
  std::string output_dir = "out";
  // Diagnostics settings; defaults follow the documented config keys.
  std::optional<Point> kernel_center;
  std::optional<double> kernel_time;
  std::int64_t density_stride = 2;
  std::optional<double> density_rmax;

  /// Throws ConfigError describing the first inconsistent field.
  void validate() const;

  Potential potential() const { return Potential(delta); }
  /// Number of forward Euler steps to reach t_end.
  std::int64_t step_count() const;
  /// Step actually taken: t_end / step_count(), never above the requested dt.
  double effective_dt() const;
  KernelSpec kernel() const;
  double density_radius_max() const;

  bool operator==(const SolverConfig&) const = default;
};

/// Largest admissible forward Euler step.
///   yosida:     min(h^2/(2n+2), eps^2 * delta/(1-delta), 1/(2n/h^2 + (1-delta)/(delta eps^2)))
/// The last term keeps the explicit step monotone, which is what bounds
/// sup|phi| by the outer zero of F_delta'; the first two alone do not.
///   projection: min(h^2/(2n+2), eps^2/2)
double stability_limit(const Grid& grid, double epsilon, std::optional<double> delta, Scheme scheme);
double stability_limit(const SolverConfig& config);

/// Second-order centred Laplacian with mirrored ghost nodes (homogeneous Neumann).
ScalarField laplacian_h(const ScalarField& field);

/// phi <- phi + dt (Lap_h phi - F_delta'(phi)/eps^2).
PhaseState step_yosida(const PhaseState& state, double dt);
/// phi* <- phi + dt (Lap_h phi + phi/eps^2), phi <- clamp(phi*, -1, 1).
PhaseState step_projection(const PhaseState& state, double dt);

/// Per-step accumulators: dissipation is dt h^n sum eps v^2 with v the
/// realized velocity; the multiplier is lambda = (phi* - clamp(phi*)) eps^2 / dt.
struct StepStats {
  double dissipation = 0.0;
  double lambda_mass = 0.0;
};

/// Time-stepping driver owning a double-buffered field.
class Simulation {
 public:
  explicit Simulation(SolverConfig config);

  const SolverConfig& config() const noexcept { return config_; }
  const PhaseState& state() const noexcept { return state_; }
  std::int64_t step_index() const noexcept { return step_; }
  std::int64_t total_steps() const noexcept { return total_steps_; }
  double dt() const noexcept { return dt_; }
  bool finished() const noexcept { return step_ >= total_steps_; }

  /// One step. Throws BlowUpError when sup|phi| exceeds twice the saturation.
  void advance();

  double dissipation_accum() const noexcept { return dissipation_; }
  /// sum |lambda| h^n of the most recent step (projection only, else 0).
  double lambda_mass() const noexcept { return lambda_mass_; }

  /// Throws MarginError if the zero level set is within 4*eps of a face.
  void check_margin() const;

 private:
  SolverConfig config_;
  Potential potential_;
  PhaseState state_;
  std::vector<double> scratch_;
  std::int64_t step_ = 0;
  std::int64_t total_steps_ = 0;
  double dt_ = 0.0;
  double dissipation_ = 0.0;
  double lambda_mass_ = 0.0;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double total_energy = 0.0;
  double xi_sup = 0.0;
  double xi_mass = 0.0;
  double huisken = 0.0;
  double density_ratio_max = 0.0;
  double dissipation_accum = 0.0;
  double lambda_mass = 0.0;
};

struct RunOutput {
  std::vector<PhaseState> snapshots;
  std::vector<std::int64_t> snapshot_steps;
  /// Accumulators at each snapshot, used when persisting.
  std::vector<DiagnosticsRecord> snapshot_accumulators;
  std::vector<DiagnosticsRecord> diagnostics;
};

/// Called after initialisation and after every step.
using StepObserver = std::function<void(const Simulation&)>;

/// Advances to t_end, taking snapshots every `snapshot_every` steps and
/// diagnostics every `diagnostics_every` steps (both also at the final
/// step). Deterministic given the config.
RunOutput run(const SolverConfig& config, const StepObserver& observer = {});

}  // namespace obstacle_mcf
