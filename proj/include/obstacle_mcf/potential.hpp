#pragma once

#include <optional>
#include <vector>

namespace obstacle_mcf {

/// Regularization parameter of the Yosida-smoothed obstacle potential.
/// Valid values lie in the open interval (0, 1/2).
class ObstacleParam {
 public:
  explicit ObstacleParam(double delta);

  double delta() const noexcept { return delta_; }
  /// Location of the two wells, (1 - delta)^-1.
  double well() const noexcept { return 1.0 / (1.0 - delta_); }
  /// Curvature of the outer branches, (1 - delta) / delta.
  double outer_stiffness() const noexcept { return (1.0 - delta_) / delta_; }

 private:
  double delta_;
};

struct ProfileParam {
  double epsilon;
  std::optional<ObstacleParam> obstacle;  ///< absent selects the limit profile

  explicit ProfileParam(double epsilon, std::optional<ObstacleParam> obstacle = std::nullopt);
};

double f_delta(double s, ObstacleParam p);
double f_delta_prime(double s, ObstacleParam p);
double f_zero(double s);
double f_zero_prime(double s);

/// Surface tension: integral of sqrt(2 F_delta) between the wells, by
/// adaptive Gauss-Kronrod quadrature.
double sigma_delta(ObstacleParam p);
/// Closed-form antiderivative evaluation of the same integral.
double sigma_delta_closed_form(ObstacleParam p);

/// Standing wave of the limit problem: -1, sin(r/eps), +1.
double profile_q(double r, double epsilon);
double profile_q_deriv(double r, double epsilon);

/// Standing wave of the regularized problem (sine core, exponential tails).
double profile_q_delta(double r, double epsilon, ObstacleParam p);
double profile_q_delta_deriv(double r, double epsilon, ObstacleParam p);

/// Half-width of the sine core of profile_q_delta: eps * asin(sqrt(1 - delta)).
double profile_core_half_width(double epsilon, ObstacleParam p);

/// Either F_delta (delta present) or the limit potential F_0 = (1 - s^2)/2
/// restricted to [-1, 1]. This is the value type the solver and the
/// diagnostics carry around.
class Potential {
 public:
  Potential() = default;
  explicit Potential(std::optional<double> delta);

  bool regularized() const noexcept { return obstacle_.has_value(); }
  std::optional<double> delta() const;

  double value(double s) const {
    return obstacle_ ? f_delta(s, *obstacle_) : f_zero(s);
  }
  double derivative(double s) const {
    return obstacle_ ? f_delta_prime(s, *obstacle_) : f_zero_prime(s);
  }
  /// Value of the saturated phase: (1-delta)^-1, or 1 for the limit problem.
  double saturation() const noexcept { return obstacle_ ? obstacle_->well() : 1.0; }
  /// sigma_delta, or pi/2 for the limit problem.
  double sigma() const noexcept { return sigma_; }

  double profile(double r, double epsilon) const;
  double profile_deriv(double r, double epsilon) const;

 private:
  std::optional<ObstacleParam> obstacle_;
  double sigma_ = 0.0;
};

/// Normalized level Phi(s) = sigma^-1 * integral_{-sat}^{s} sqrt(2F(y)) dy.
/// Inputs outside [-sat, sat] are clamped; the endpoints map to exactly 0 and 1.
double phi_transform(double s, const Potential& potential);
double phi_transform(double s, ObstacleParam p);

/// Tabulated Phi for bulk evaluation over fields. Node values come from the
/// same quadrature as phi_transform; between nodes a cubic Hermite
/// interpolant uses the exact derivative sqrt(2F)/sigma.
class LevelTransform {
 public:
  explicit LevelTransform(const Potential& potential, int panels_per_branch = 2048);

  double operator()(double s) const;

 private:
  struct Branch {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    std::vector<double> values;
  };

  Potential potential_;
  std::vector<Branch> branches_;
};

}  // namespace obstacle_mcf
