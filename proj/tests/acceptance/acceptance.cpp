// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Reference setup: 2-D box [-1,1]^2, eps = 0.05, h = eps/4 (161^2 nodes),
// delta = eps^2 for the yosida scheme, circle r0 = 0.5, t_end = 0.06.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "obstacle_mcf/commands.hpp"
#include "obstacle_mcf/config.hpp"
#include "obstacle_mcf/errors.hpp"
#include "obstacle_mcf/mcf_oracle.hpp"
#include "obstacle_mcf/measures.hpp"
#include "obstacle_mcf/snapshot_io.hpp"

using namespace obstacle_mcf;
namespace fs = std::filesystem;

namespace {

// Tolerances, as stated by the criteria.
constexpr double kProfileTol = 1e-12;
constexpr double kSigmaTol = 1e-8;
constexpr double kSigmaLimitTol = 1e-2;
constexpr double kXiCapFactor = 1e-3;        // xi_sup <= 1e-3 sigma / eps
constexpr double kXiRefinementGain = 1.6;
constexpr double kMaxPrincipleSlack = 1e-12;
constexpr double kDissipationTol = 0.02;
constexpr double kDissipationGain = 1.7;
constexpr double kHuiskenStepSlack = 1e-3;   // per sample, relative to the initial value
constexpr double kHuiskenGain = 1.5;
constexpr double kBrakkeTol = 0.05;
constexpr double kRadiusTolFactor = 0.5;     // |r - r_exact| <= 0.5 eps
constexpr double kDensityBand = 0.2;
constexpr double kDensityCeiling = 2.0;
constexpr double kBvSlack = 0.05;
constexpr double kHolderChange = 0.10;

constexpr double kEps = 0.05;
constexpr double kRadius = 0.5;
constexpr double kTEnd = 0.06;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SolverConfig circle(Scheme scheme, double eps, std::size_t nodes, int dim = 2, double t_end = kTEnd) {
  SolverConfig c;
  c.grid = Grid::cube(dim, nodes, 2.0);
  c.shape = Sphere{{0, 0, 0}, kRadius};
  c.epsilon = eps;
  c.delta = scheme == Scheme::yosida ? std::optional<double>(eps * eps) : std::nullopt;
  c.scheme = scheme;
  c.t_end = t_end;
  c.kernel_center = Point{0, 0, 0};
  c.kernel_time = t_end + eps * eps;
  c.snapshot_every = std::numeric_limits<std::int64_t>::max() / 2;
  c.diagnostics_every = std::numeric_limits<std::int64_t>::max() / 2;
  return c;
}

std::size_t nodes_for(double eps) { return static_cast<std::size_t>(std::llround(2.0 / (eps / 4))) + 1; }

/// Requests exactly `steps` equal steps.
void set_steps(SolverConfig& c, std::int64_t steps) { c.dt = c.t_end / (static_cast<double>(steps) - 0.5); }

/// Step count of dt = auto rounded up to a multiple of `m`.
std::int64_t auto_steps_multiple(const SolverConfig& c, std::int64_t m) {
  SolverConfig a = c;
  a.dt.reset();
  const std::int64_t n = a.step_count();
  return (n + m - 1) / m * m;
}

/// Time series collected while a run advances.
struct Probe {
  std::int64_t every = 1;
  std::optional<KernelSpec> kernel;
  std::vector<double> t;
  std::vector<double> huisken;
  std::vector<double> xi_sup;
  std::vector<double> xi_mass;

  struct BrakkeSample {
    double t = 0.0;
    double predicted = 0.0;   // B(phi)
    double mu_before = 0.0;
    double support_mass = 0.0;
    double quotient = 0.0;    // (mu(t + dt) - mu(t)) / dt
  };
  std::vector<double> brakke_times;
  std::optional<TestFunction> bump;
  std::vector<BrakkeSample> brakke;
  std::set<std::int64_t> brakke_steps;
  std::optional<BrakkeSample> pending;

  void operator()(const Simulation& sim) {
    const PhaseState& s = sim.state();
    const std::int64_t k = sim.step_index();
    if (pending) {
      pending->quotient = (energy_measure(s, *bump) - pending->mu_before) / sim.dt();
      brakke.push_back(*pending);
      pending.reset();
    }
    if (bump && brakke_steps.count(k)) {
      BrakkeSample b;
      b.t = s.t;
      b.predicted = brakke_functional(s, *bump);
      b.mu_before = energy_measure(s, *bump);
      b.support_mass = energy_on_support(s, *bump);
      pending = b;
    }
    if (k % every == 0 || sim.finished()) {
      t.push_back(s.t);
      const DiscrepancyResult d = discrepancy_measure(s);
      xi_sup.push_back(d.xi_sup);
      xi_mass.push_back(d.xi_mass);
      if (kernel) huisken.push_back(huisken_functional(s, *kernel, sim.dt()));
    }
  }

  void plan_brakke(const SolverConfig& c, std::int64_t total_steps) {
    for (double target : brakke_times) {
      brakke_steps.insert(static_cast<std::int64_t>(std::ceil(target / c.t_end * static_cast<double>(total_steps))));
    }
  }
};

struct ProbedRun {
  SolverConfig config;
  RunOutput output;
  Probe probe;
  double seconds = 0.0;
};

ProbedRun probed_run(const SolverConfig& c, Probe probe) {
  ProbedRun r;
  r.config = c;
  r.probe = std::move(probe);
  r.probe.plan_brakke(c, c.step_count());
  const auto start = std::chrono::steady_clock::now();
  r.output = run(c, std::ref(r.probe));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

void profile_identities() {
  double residual = 0.0;
  double edge = 0.0;
  double slope = 0.0;
  for (double delta : {0.3, 0.1, 0.01, 1e-4}) {
    const ObstacleParam p(delta);
    const double b = profile_core_half_width(kEps, p);
    for (int i = 0; i < 1000; ++i) {
      const double r = -3.0 * b + 6.0 * b * i / 999.0;
      const double q = profile_q_delta(r, kEps, p);
      const double dq = profile_q_delta_deriv(r, kEps, p);
      residual = std::max(residual, std::abs(kEps * dq - std::sqrt(2.0 * f_delta(q, p))));
      slope = std::max(slope, std::abs(dq));
    }
    edge = std::max({edge, std::abs(profile_q_delta(b, kEps, p) - 1.0), std::abs(profile_q_delta(-b, kEps, p) + 1.0)});
  }
  const bool pass = residual < kProfileTol && edge < kProfileTol && slope <= 2.0 / kEps;
  report(1, "profile identities", pass,
         fmt("ode residual %.2e, core edge error %.2e (tol %.0e); eps*sup|q'| = %.4f (<= 2)", residual, edge,
             kProfileTol, slope * kEps));
}

void surface_tension() {
  double worst = 0.0;
  for (double delta : {0.3, 0.1, 0.01}) {
    const ObstacleParam p(delta);
    worst = std::max(worst, std::abs(sigma_delta(p) - sigma_delta_closed_form(p)));
  }
  const double gap = std::abs(sigma_delta(ObstacleParam(1e-4)) - std::numbers::pi / 2);
  report(2, "surface tension", worst < kSigmaTol && gap < kSigmaLimitTol,
         fmt("max |quadrature - closed form| %.2e (tol %.0e); |sigma(1e-4) - pi/2| = %.3e (tol %.0e)", worst,
             kSigmaTol, gap, kSigmaLimitTol));
}

void initial_discrepancy(double sigma) {
  const double cap = kXiCapFactor * sigma / kEps;
  double xi[2];
  for (int i = 0; i < 2; ++i) {
    const SolverConfig c = circle(Scheme::yosida, kEps, i == 0 ? 161 : 321);
    const PhaseState s{build_initial_field(c.grid, c.shape, c.epsilon, c.delta), c.epsilon, c.delta, 0.0,
                       Scheme::yosida};
    xi[i] = discrepancy_measure(s).xi_sup;
  }
  const double gain = xi[0] / xi[1];
  report(3, "initial discrepancy negativity", xi[0] <= cap && gain >= kXiRefinementGain,
         fmt("xi_sup(h=eps/4) = %.4e vs cap %.4e; xi_sup(h=eps/8) = %.4e, gain %.3f (>= %.1f)", xi[0], cap, xi[1],
             gain, kXiRefinementGain));
}

void discrepancy_in_time(const ProbedRun& coarse, const ProbedRun& fine, double sigma) {
  const double cap = kXiCapFactor * sigma / kEps;
  const double a = max_of(coarse.probe.xi_sup);
  const double b = max_of(fine.probe.xi_sup);
  const double gain = a / b;
  report(4, "discrepancy negativity in time", a <= cap && gain >= kXiRefinementGain,
         fmt("max_t xi_sup(h=eps/4) = %.4e vs cap %.4e; max_t xi_sup(h=eps/8) = %.4e, gain %.3f (>= %.1f)", a, cap,
             b, gain, kXiRefinementGain));
}

void maximum_principle(const ProbedRun& yosida, const ProbedRun& projection) {
  const double sat = 1.0 / (1.0 - kEps * kEps);
  double y = 0.0;
  for (const auto& s : yosida.output.snapshots) y = std::max(y, s.field.sup_abs());
  double p = 0.0;
  for (const auto& s : projection.output.snapshots) p = std::max(p, s.field.sup_abs());
  report(5, "maximum principle", y <= sat + kMaxPrincipleSlack && p <= 1.0,
         fmt("yosida sup|phi| - 1/(1-delta) = %.3e over %zu snapshots; projection sup|phi| = %.17g over %zu", y - sat,
             yosida.output.snapshots.size(), p, projection.output.snapshots.size()));
}

void dissipation(const ProbedRun& full, const ProbedRun& half) {
  const double a = dissipation_check(full.output.diagnostics);
  const double b = dissipation_check(half.output.diagnostics);
  const double gain = a / b;
  report(6, "dissipation identity", a <= kDissipationTol && gain >= kDissipationGain,
         fmt("relative residual %.4e at dt = %.4e (tol %.2f); %.4e at dt/2, gain %.3f (>= %.1f)", a,
             full.config.effective_dt(), kDissipationTol, b, gain, kDissipationGain));
}

struct HuiskenViolation {
  double worst_step = 0.0;
  double total = 0.0;
};

HuiskenViolation huisken_violation(const std::vector<double>& h) {
  HuiskenViolation v;
  for (std::size_t i = 1; i < h.size(); ++i) {
    const double inc = std::max(0.0, h[i] - h[i - 1]);
    v.worst_step = std::max(v.worst_step, inc);
    v.total += inc;
  }
  return v;
}

void huisken_monotonicity(const ProbedRun& coarse, const ProbedRun& fine) {
  const double h0 = coarse.probe.huisken.front();
  const HuiskenViolation a = huisken_violation(coarse.probe.huisken);
  const HuiskenViolation b = huisken_violation(fine.probe.huisken);
  // A violation that is already zero cannot shrink further; zero on both
  // resolutions counts as shrinking.
  const bool shrinks = a.total == 0.0 ? b.total == 0.0 : b.total * kHuiskenGain <= a.total;
  const bool pass = a.worst_step <= kHuiskenStepSlack * h0 && shrinks;
  report(7, "Huisken monotonicity", pass,
         fmt("H(0) = %.5f; worst increase between samples %.3e (slack %.3e, %zu samples); total violation %.3e -> "
             "%.3e under (h, dt) refinement",
             h0, a.worst_step, kHuiskenStepSlack * h0, coarse.probe.huisken.size(), a.total, b.total));
}

struct BrakkeError {
  double worst = 0.0;
  bool lemma = true;
};

BrakkeError brakke_error(const ProbedRun& r, double mu0, double hess) {
  BrakkeError e;
  for (const auto& s : r.probe.brakke) {
    const double scale = std::max(std::abs(s.predicted), mu0 / r.config.t_end);
    e.worst = std::max(e.worst, std::abs(s.quotient - s.predicted) / scale);
    e.lemma = e.lemma && s.quotient <= hess * s.support_mass + kBrakkeTol * scale;
  }
  return e;
}

void brakke_consistency(const ProbedRun& coarse, const ProbedRun& fine, const TestFunction& bump) {
  auto mu0 = [&](const ProbedRun& r) { return energy_measure(r.output.snapshots.front(), bump); };
  const BrakkeError a = brakke_error(coarse, mu0(coarse), bump.hessian_bound());
  const BrakkeError b = brakke_error(fine, mu0(fine), bump.hessian_bound());
  const bool pass = a.worst <= kBrakkeTol && b.worst < a.worst && a.lemma && b.lemma;
  report(8, "Brakke consistency", pass,
         fmt("max scaled |dmu/dt - B| %.3e (tol %.2f) -> %.3e refined; localized bound %s, %zu sample times",
             a.worst, kBrakkeTol, b.worst, a.lemma && b.lemma ? "holds" : "violated", coarse.probe.brakke.size()));
}

void sharp_interface() {
  const double eps_list[3] = {0.1, 0.05, 0.025};
  const double times[3] = {0.02, 0.04, 0.06};
  double err[3][3] = {};
  bool within = true;
  for (int e = 0; e < 3; ++e) {
    SolverConfig c = circle(Scheme::projection, eps_list[e], nodes_for(eps_list[e]));
    const std::int64_t n = auto_steps_multiple(c, 3);
    set_steps(c, n);
    c.snapshot_every = n / 3;
    const RunOutput out = run(c);
    for (int k = 0; k < 3; ++k) {
      const PhaseState& s = out.snapshots[static_cast<std::size_t>(k + 1)];
      const double r = radius_estimate(extract_zero_level(s), {0, 0, 0}).mean;
      err[e][k] = std::abs(r - sphere_radius_exact(kRadius, 2, times[k]));
      within = within && err[e][k] <= kRadiusTolFactor * eps_list[e];
    }
  }
  bool monotone = true;
  for (int k = 0; k < 3; ++k) monotone = monotone && err[0][k] > err[1][k] && err[1][k] > err[2][k];

  SolverConfig c3 = circle(Scheme::projection, 0.1, nodes_for(0.1), 3, 0.02);
  const RunOutput out3 = run(c3);
  const double r3 = radius_estimate(extract_zero_level(out3.snapshots.back()), {0, 0, 0}).mean;
  const double err3 = std::abs(r3 - sphere_radius_exact(kRadius, 3, 0.02));
  const bool pass = within && monotone && err3 <= kRadiusTolFactor * 0.1;
  std::string detail = "radius error at t=0.02/0.04/0.06:";
  for (int e = 0; e < 3; ++e)
    detail += fmt(" eps=%g [%.2e %.2e %.2e]", eps_list[e], err[e][0], err[e][1], err[e][2]);
  detail += fmt("; %s; 3-D eps=0.1 t=0.02 error %.3e (tol %.3f)", monotone ? "monotone in eps" : "NOT monotone",
                err3, kRadiusTolFactor * 0.1);
  report(9, "sharp-interface limit", pass, detail);
}

void vanishing_discrepancy(const ProbedRun& reference) {
  std::vector<XiStudyInput> runs;
  for (double eps : {0.1, 0.05, 0.025}) {
    XiStudyInput in;
    in.epsilon = eps;
    const Probe* probe = &reference.probe;
    ProbedRun own;
    if (eps != kEps) {
      const SolverConfig c = circle(Scheme::yosida, eps, nodes_for(eps));
      Probe p;
      p.every = std::max<std::int64_t>(1, c.step_count() / 400);
      own = probed_run(c, p);
      probe = &own.probe;
    }
    for (std::size_t i = 0; i < probe->t.size(); ++i) {
      DiagnosticsRecord r;
      r.t = probe->t[i];
      r.xi_mass = probe->xi_mass[i];
      in.diagnostics.push_back(r);
    }
    runs.push_back(std::move(in));
  }
  const auto rows = xi_vanishing_study(runs, 0.0, kTEnd);
  const bool pass = rows[0].max_xi_mass > rows[1].max_xi_mass && rows[1].max_xi_mass > rows[2].max_xi_mass;
  report(10, "vanishing discrepancy", pass,
         fmt("max_t xi_mass over [0, 0.06]: eps=0.1 %.4e, eps=0.05 %.4e, eps=0.025 %.4e", rows[0].max_xi_mass,
             rows[1].max_xi_mass, rows[2].max_xi_mass));
}

void density_bound(const ProbedRun& r) {
  const auto& d = r.output.diagnostics;
  const double d0 = d.front().density_ratio_max;
  double lo = d0;
  double hi = d0;
  for (const auto& rec : d) {
    lo = std::min(lo, rec.density_ratio_max);
    hi = std::max(hi, rec.density_ratio_max);
  }
  const double spread = std::max(hi - d0, d0 - lo) / d0;
  report(11, "density ratio bound", spread <= kDensityBand && hi <= kDensityCeiling * d0,
         fmt("t=0 value %.4f, range [%.4f, %.4f] over %zu samples, max relative deviation %.3f (tol %.2f)", d0, lo, hi,
             d.size(), spread, kDensityBand));
}

void bv_holder(const ProbedRun& full, const ProbedRun& half, double sigma) {
  const BvHolderResult a = bv_holder_check(full.output.snapshots);
  const BvHolderResult b = bv_holder_check(half.output.snapshots);
  const double mu0 = energy_measure(full.output.snapshots.front());
  const double bound = mu0 / sigma * (1.0 + kBvSlack);
  const double change = std::abs(a.holder_max - b.holder_max) / a.holder_max;
  const bool pass = a.bv_max <= bound && std::isfinite(a.holder_max) && change <= kHolderChange;
  report(12, "BV / Hoelder bounds", pass,
         fmt("max_t BV %.4f vs bound %.4f; Hoelder max %.4f (dt) / %.4f (dt/2), change %.3f (tol %.2f), %zu snapshots",
             a.bv_max, bound, a.holder_max, b.holder_max, change, kHolderChange, full.output.snapshots.size()));
}

void determinism(const SolverConfig& reference) {
  const fs::path root = fs::temp_directory_path() / "obstacle_mcf_acceptance";
  fs::remove_all(root);
  SolverConfig a = reference;
  SolverConfig b = reference;
  a.output_dir = (root / "a").string();
  b.output_dir = (root / "b").string();
  const RunManifest ma = cmd_run(a);
  const RunManifest mb = cmd_run(b);
  bool identical = slurp(root / "a" / "diagnostics.csv") == slurp(root / "b" / "diagnostics.csv");
  const auto snaps = list_snapshots(root / "a");
  for (const auto& s : snaps) {
    identical = identical && slurp(s / "field.f64") == slurp(root / "b" / s.filename() / "field.f64") &&
                slurp(s / "meta.json") == slurp(root / "b" / s.filename() / "meta.json");
  }
  identical = identical && ma.files.size() == mb.files.size() && verify_manifest(ma) && verify_manifest(mb);

  const Snapshot first = read_snapshot(snaps.back());
  write_snapshot(root / "copy", first);
  const Snapshot second = read_snapshot(root / "copy");
  const bool round_trip = second.state.field.values == first.state.field.values && second.state.t == first.state.t &&
                          slurp(root / "copy" / "field.f64") == slurp(snaps.back() / "field.f64");

  const DiagnoseReport d = cmd_diagnose(root / "a");
  const bool diagnose = d.compared > 0 && d.identical == d.compared;
  report(13, "determinism and persistence", identical && round_trip && diagnose,
         fmt("two runs %s (%zu snapshots); snapshot round trip %s; diagnose reproduced %zu of %zu in-run rows",
             identical ? "byte-identical" : "DIFFER", snaps.size(), round_trip ? "bit-exact" : "DIFFERS",
             d.identical, d.compared));
  fs::remove_all(root);
}

}  // namespace

int main() {
  apply_thread_configuration();
  const auto start = std::chrono::steady_clock::now();
  const double sigma = sigma_delta(ObstacleParam(kEps * kEps));

  profile_identities();
  surface_tension();
  initial_discrepancy(sigma);

  // Reference yosida run at dt = auto, its dt/2 twin with snapshots at the
  // same times, and the (h, dt)-refined run at h = eps/8.
  const TestFunction bump = TestFunction::bump({0.45, 0, 0}, 0.25, 2);
  SolverConfig ref = circle(Scheme::yosida, kEps, 161);
  const std::int64_t n_ref = ref.step_count();
  // Snapshots fall on diagnostics samples so that diagnose has rows to
  // compare against.
  ref.diagnostics_every = (n_ref + 119) / 120;
  const std::int64_t snap_every = 10 * ref.diagnostics_every;
  ref.snapshot_every = snap_every;
  Probe probe;
  probe.every = std::max<std::int64_t>(1, n_ref / 600);
  probe.kernel = ref.kernel();
  probe.bump = bump;
  probe.brakke_times = {0.005, 0.02, 0.04};
  const ProbedRun reference = probed_run(ref, probe);
  std::printf("  reference yosida run: %lld steps, %.1f s\n", static_cast<long long>(n_ref), reference.seconds);

  SolverConfig half_cfg = ref;
  set_steps(half_cfg, 2 * n_ref);
  half_cfg.snapshot_every = 2 * snap_every;
  half_cfg.diagnostics_every = 2 * ref.diagnostics_every;
  const ProbedRun half = probed_run(half_cfg, Probe{});
  std::printf("  dt/2 run: %.1f s\n", half.seconds);

  SolverConfig fine_cfg = circle(Scheme::yosida, kEps, 321);
  fine_cfg.diagnostics_every = fine_cfg.step_count();
  Probe fine_probe = probe;
  fine_probe.every = std::max<std::int64_t>(1, fine_cfg.step_count() / 600);
  const ProbedRun fine = probed_run(fine_cfg, fine_probe);
  std::printf("  refined run: %lld steps, %.1f s\n", static_cast<long long>(fine_cfg.step_count()), fine.seconds);

  SolverConfig proj_cfg = circle(Scheme::projection, kEps, 161);
  proj_cfg.snapshot_every = std::max<std::int64_t>(1, proj_cfg.step_count() / 12);
  const ProbedRun projection = probed_run(proj_cfg, Probe{});

  discrepancy_in_time(reference, fine, sigma);
  maximum_principle(reference, projection);
  dissipation(reference, half);
  huisken_monotonicity(reference, fine);
  brakke_consistency(reference, fine, bump);
  sharp_interface();
  vanishing_discrepancy(reference);
  density_bound(reference);
  bv_holder(reference, half, sigma);
  determinism(ref);

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 13 criteria failed; %.0f s\n", failures, total);
  return failures == 0 ? 0 : 1;
}
