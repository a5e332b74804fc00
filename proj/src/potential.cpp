#include "obstacle_mcf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace obstacle_mcf {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr unsigned kQuadratureDepth = 15;
// Table panels are short; a few bisections suffice even next to the square
// root endpoints of the limit potential, and a deeper search would chase a
// relative tolerance the tiny panel integrals near a well cannot meet.
constexpr unsigned kPanelDepth = 4;

template <class F>
double integrate(F&& f, double lo, double hi, unsigned depth = kQuadratureDepth) {
  if (!(hi > lo)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, depth, kQuadratureTolerance);
}

/// Integral of sqrt(2F) over [lo, hi], split at the branch points +-1 so
/// every panel sees a smooth integrand.
double integrate_root(const Potential& potential, double lo, double hi) {
  auto root = [&potential](double y) {
    return std::sqrt(std::max(0.0, 2.0 * potential.value(y)));
  };
  double total = 0.0;
  double a = lo;
  for (double cut : {-1.0, 1.0}) {
    if (cut > a && cut < hi) {
      total += integrate(root, a, cut);
      a = cut;
    }
  }
  total += integrate(root, a, hi);
  return total;
}

}  // namespace

ObstacleParam::ObstacleParam(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("delta must lie in (0, 1/2)");
  }
}

ProfileParam::ProfileParam(double eps, std::optional<ObstacleParam> obs)
    : epsilon(eps), obstacle(obs) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

// Branches are half-open: the lower branch owns its right endpoint.
double f_delta(double s, ObstacleParam p) {
  const double well = p.well();
  if (s <= -1.0) {
    const double d = s + well;
    return 0.5 * p.outer_stiffness() * d * d;
  }
  if (s <= 1.0) return -0.5 * s * s + 0.5 * well;
  const double d = s - well;
  return 0.5 * p.outer_stiffness() * d * d;
}

double f_delta_prime(double s, ObstacleParam p) {
  if (s <= -1.0) return p.outer_stiffness() * (s + p.well());
  if (s <= 1.0) return -s;
  return p.outer_stiffness() * (s - p.well());
}

double f_zero(double s) { return 0.5 * (1.0 - s * s); }
double f_zero_prime(double s) { return -s; }

double sigma_delta(ObstacleParam p) {
  const Potential potential(p.delta());
  return potential.sigma();
}

double sigma_delta_closed_form(ObstacleParam p) {
  const double d = p.delta();
  const double ratio = d / (1.0 - d);
  return std::sqrt(ratio) + std::asin(std::sqrt(1.0 - d)) / (1.0 - d) + std::pow(ratio, 1.5);
}

double profile_q(double r, double epsilon) {
  const double edge = 0.5 * std::numbers::pi * epsilon;
  if (r < -edge) return -1.0;
  if (r <= edge) return std::sin(r / epsilon);
  return 1.0;
}

double profile_q_deriv(double r, double epsilon) {
  const double edge = 0.5 * std::numbers::pi * epsilon;
  if (r < -edge || r > edge) return 0.0;
  return std::cos(r / epsilon) / epsilon;
}

double profile_core_half_width(double epsilon, ObstacleParam p) {
  return epsilon * std::asin(std::sqrt(1.0 - p.delta()));
}

// Tails written as a_inf -/+ delta/(1-delta) * exp(-k (|r| - b)/eps), which
// equals the printed form with the constant folded into the exponent.
double profile_q_delta(double r, double epsilon, ObstacleParam p) {
  const double d = p.delta();
  const double b = profile_core_half_width(epsilon, p);
  const double k = std::sqrt(p.outer_stiffness());
  const double gap = d / (1.0 - d);
  if (r <= -b) return gap * std::exp(k * (r + b) / epsilon) - p.well();
  if (r <= b) return std::sin(r / epsilon) / std::sqrt(1.0 - d);
  return p.well() - gap * std::exp(-k * (r - b) / epsilon);
}

double profile_q_delta_deriv(double r, double epsilon, ObstacleParam p) {
  const double d = p.delta();
  const double b = profile_core_half_width(epsilon, p);
  const double k = std::sqrt(p.outer_stiffness());
  const double gap = d / (1.0 - d);
  if (r <= -b) return gap * (k / epsilon) * std::exp(k * (r + b) / epsilon);
  if (r <= b) return std::cos(r / epsilon) / (epsilon * std::sqrt(1.0 - d));
  return gap * (k / epsilon) * std::exp(-k * (r - b) / epsilon);
}

Potential::Potential(std::optional<double> delta) {
  if (delta) {
    obstacle_.emplace(*delta);
    sigma_ = integrate_root(*this, -saturation(), saturation());
  } else {
    sigma_ = 0.5 * std::numbers::pi;
  }
}

std::optional<double> Potential::delta() const {
  if (obstacle_) return obstacle_->delta();
  return std::nullopt;
}

double Potential::profile(double r, double epsilon) const {
  return obstacle_ ? profile_q_delta(r, epsilon, *obstacle_) : profile_q(r, epsilon);
}

double Potential::profile_deriv(double r, double epsilon) const {
  return obstacle_ ? profile_q_delta_deriv(r, epsilon, *obstacle_)
                   : profile_q_deriv(r, epsilon);
}

double phi_transform(double s, const Potential& potential) {
  const double sat = potential.saturation();
  if (s <= -sat) return 0.0;
  if (s >= sat) return 1.0;
  return integrate_root(potential, -sat, s) / potential.sigma();
}

double phi_transform(double s, ObstacleParam p) {
  return phi_transform(s, Potential(p.delta()));
}

LevelTransform::LevelTransform(const Potential& potential, int panels_per_branch)
    : potential_(potential) {
  if (panels_per_branch < 1) throw std::invalid_argument("panels_per_branch must be >= 1");
  const double sat = potential.saturation();
  std::vector<std::pair<double, double>> ranges;
  if (potential.regularized()) {
    ranges = {{-sat, -1.0}, {-1.0, 1.0}, {1.0, sat}};
  } else {
    ranges = {{-1.0, 1.0}};
  }
  auto root = [&potential](double y) {
    return std::sqrt(std::max(0.0, 2.0 * potential.value(y)));
  };
  double base = 0.0;
  for (auto [lo, hi] : ranges) {
    Branch branch;
    branch.lo = lo;
    branch.hi = hi;
    branch.step = (hi - lo) / panels_per_branch;
    branch.values.resize(static_cast<std::size_t>(panels_per_branch) + 1);
    branch.values[0] = base;
    for (int j = 0; j < panels_per_branch; ++j) {
      const double a = lo + j * branch.step;
      const double b = (j + 1 == panels_per_branch) ? hi : a + branch.step;
      branch.values[j + 1] = branch.values[j] + integrate(root, a, b, kPanelDepth) / potential.sigma();
    }
    base = branch.values.back();
    branches_.push_back(std::move(branch));
  }
}

double LevelTransform::operator()(double s) const {
  const double sat = potential_.saturation();
  if (s <= -sat) return 0.0;
  if (s >= sat) return 1.0;
  const Branch* branch = &branches_.back();
  for (const auto& b : branches_) {
    if (s <= b.hi) {
      branch = &b;
      break;
    }
  }
  const auto panels = static_cast<std::ptrdiff_t>(branch->values.size()) - 1;
  auto j = static_cast<std::ptrdiff_t>(std::floor((s - branch->lo) / branch->step));
  j = std::clamp<std::ptrdiff_t>(j, 0, panels - 1);
  const double x0 = branch->lo + static_cast<double>(j) * branch->step;
  const double x1 = (j + 1 == panels) ? branch->hi : x0 + branch->step;
  const double width = x1 - x0;
  const double u = (s - x0) / width;
  auto slope = [this](double y) {
    return std::sqrt(std::max(0.0, 2.0 * potential_.value(y))) / potential_.sigma();
  };
  const double y0 = branch->values[j];
  const double y1 = branch->values[j + 1];
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u * u * (3.0 - 2.0 * u);
  const double h11 = u * u * (u - 1.0);
  return h00 * y0 + h10 * width * slope(x0) + h01 * y1 + h11 * width * slope(x1);
}

}  // namespace obstacle_mcf
