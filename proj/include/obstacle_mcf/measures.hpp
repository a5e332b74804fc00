#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "obstacle_mcf/solver.hpp"

namespace obstacle_mcf {

// Discrete gradient energy at a node:
//   |grad_h phi|^2 = sum_axes ( (D+ phi)^2 + (D- phi)^2 ) / 2
// with mirrored ghost nodes. Its variation is exactly -Lap_h, so the
// semi-discrete energy decays at exactly the rate eps * sum v^2.

/// Nonnegative test function with its gradient and a bound on |Hess|.
class TestFunction {
 public:
  /// phi == c on the whole box.
  static TestFunction constant(double c = 1.0);
  /// phi(x) = (1 - |x - c|^2 / R^2)^3 on the ball, 0 outside; C^2 with
  /// spectral-norm Hessian bound 6/R^2.
  static TestFunction bump(const Point& center, double radius, int dim);

  double value(const Point& x) const { return value_(x); }
  Point gradient(const Point& x) const { return gradient_(x); }
  bool in_support(const Point& x) const { return support_(x); }
  double hessian_bound() const noexcept { return hessian_bound_; }

 private:
  std::function<double(const Point&)> value_;
  std::function<Point(const Point&)> gradient_;
  std::function<bool(const Point&)> support_;
  double hessian_bound_ = 0.0;
};

/// e = eps |grad_h phi|^2 / 2 + F(phi)/eps at every node.
ScalarField energy_density(const PhaseState& state);
/// xi = eps |grad_h phi|^2 / 2 - F(phi)/eps at every node.
ScalarField discrepancy_density(const PhaseState& state);

/// mu_t(testfn) = h^n sum testfn * e.
double energy_measure(const PhaseState& state, const TestFunction& testfn);
double energy_measure(const PhaseState& state);
/// mu_t restricted to the support of testfn.
double energy_on_support(const PhaseState& state, const TestFunction& testfn);

struct DiscrepancyResult {
  double xi_sup = 0.0;
  double xi_mass = 0.0;  ///< h^n sum |xi|
  ScalarField field;
};
DiscrepancyResult discrepancy_measure(const PhaseState& state);

/// (4 pi (s - t))^{-(n-1)/2} exp(-|x - y|^2 / (4 (s - t))).
double backward_heat_kernel(const KernelSpec& kernel, const Point& x, double t, int dim);

/// h^n sum rho_{y,s}(x, t) e(x). Throws KernelTooCloseError when s - t < 2 dt.
double huisken_functional(const PhaseState& state, const KernelSpec& kernel, double dt);

/// Radii 2h, 4h, 8h, ... not exceeding r_max.
std::vector<double> dyadic_radii(double h, double r_max);

/// Max over centers (every `stride`-th node per axis) and radii of
/// mu(B_R(x)) / (omega_{n-1} R^{n-1}); balls contain the nodes whose
/// centres lie within distance R.
double density_ratio_scan(const PhaseState& state, std::int64_t stride, std::span<const double> radii);
double density_ratio_scan(const ScalarField& energy, std::int64_t stride, std::span<const double> radii);

/// omega_k, the volume of the unit ball in R^k.
double unit_ball_volume(int k);

/// Settings shared by the in-run sampler and the offline recomputation.
struct DiagnosticsSettings {
  KernelSpec kernel;
  double dt = 0.0;
  std::int64_t density_stride = 2;
  std::vector<double> radii;

  static DiagnosticsSettings from_config(const SolverConfig& config);
};

DiagnosticsRecord sample_diagnostics(const PhaseState& state, const DiagnosticsSettings& settings,
                                     double dissipation_accum, double lambda_mass);

/// |mu_T + dissipation - mu_0| / mu_0 from the first and last record
/// (0 when mu_0 vanishes and both sides are zero).
double dissipation_check(std::span<const DiagnosticsRecord> records);

struct LocalizedMonotonicity {
  double c5 = 0.0;              ///< sup|Hess testfn| * max_t mu_t(spt testfn)
  double worst_violation = 0.0; ///< max over t1 < t2 of the increase of mu_t(testfn) - c5 t
};
LocalizedMonotonicity localized_monotonicity_check(std::span<const PhaseState> samples,
                                                   const TestFunction& testfn);

/// h^n sum [ -eps phi w^2 + eps (grad phi . grad_h u) w ],
/// w = -Lap_h u + F'(u)/eps^2, grad_h centred.
double brakke_functional(const PhaseState& state, const TestFunction& testfn);

struct XiStudyRow {
  double epsilon = 0.0;
  double max_xi_mass = 0.0;
};
struct XiStudyInput {
  double epsilon = 0.0;
  std::vector<DiagnosticsRecord> diagnostics;
};
/// For each run, the largest xi_mass among samples with t in [t_lo, t_hi].
std::vector<XiStudyRow> xi_vanishing_study(std::span<const XiStudyInput> runs, double t_lo, double t_hi);

struct BvHolderResult {
  double bv_max = 0.0;      ///< max_t h^n sum |grad_h w|
  double holder_max = 0.0;  ///< max_{t1<t2} h^n sum |w(t2) - w(t1)| / sqrt(t2 - t1)
};
/// w = Phi(phi) per snapshot (Phi the normalized level transform).
BvHolderResult bv_holder_check(std::span<const PhaseState> snapshots);

}  // namespace obstacle_mcf
