#pragma once

#include "smpkit/geometry.hpp"
#include "smpkit/model.hpp"

namespace smpkit::kernels {

enum class GreenForm { BallBrownianImage, BallStableClosedForm, WholeSpaceRiesz };
enum class SingularityKind { Power, Log };

/// G_D(x, y) for the killed Laplacian (generator Δ) or the killed fractional
/// Laplacian (generator -(-Δ)^α) on a ball, or the whole-space Riesz kernel.
/// Evaluation outside the closed ball returns 0.
class GreenKernel {
 public:
  /// Ball-domain kernel for `op`; throws PreconditionError for other domains.
  static GreenKernel for_operator(const model::OperatorSpec& op);
  /// c |x - y|^{2α - d}, the Green function of the generator on all of R^d.
  static GreenKernel riesz(int d, double alpha = 1.0);

  double operator()(const Point& x, const Point& y) const;

  GreenForm form() const { return form_; }
  const model::OperatorSpec& op() const { return op_; }
  SingularityKind singularity() const;
  /// Blow-up exponent on the diagonal: d - 2 or d - 2α (0 for the log case).
  double exponent() const;
  /// G(x, y) = leading_constant() * |x - y|^{-exponent()} + bounded, off the boundary.
  double leading_constant() const;
  int dim() const { return op_.dim; }
  double alpha() const { return op_.alpha; }

 private:
  GreenKernel() = default;
  model::OperatorSpec op_;
  GreenForm form_ = GreenForm::BallBrownianImage;
  Point center_;
  double radius_ = 1.0;
};

/// Whole-space Green constant Γ(d/2 - α) / (4^α π^{d/2} Γ(α)).
double riesz_constant(int d, double alpha);

/// Image-charge Green function of B(0, R). Throws DomainError outside the ball
/// and SingularityError at x == y.
double green_ball_brownian(int d, double R, const Point& x, const Point& y);
/// Closed-form Green function of B(0, R) for -(-Δ)^α, 0 < α < 1, 2α < d.
double green_ball_stable(int d, double alpha, double R, const Point& x, const Point& y);

/// ∫_{B(0,R)} G(x, y) dy = (R^2 - |x|^2) / (2d).
double expected_residence(int d, double R, const Point& x);
/// Stable counterpart Γ(d/2) / (4^α Γ(1+α) Γ(d/2+α)) (R^2 - |x|^2)^α.
double expected_residence_stable(int d, double alpha, double R, const Point& x);

enum class ExitVariant { AsPrinted, Normalized };

/// Exit distribution of B(x, r) for the α-stable process started at x, as a
/// density in y over |y - x| > r depending only on ρ = |y - x|.
class ExitKernel {
 public:
  ExitKernel(int d, double alpha, double r, ExitVariant variant = ExitVariant::Normalized);

  double density(double rho) const;
  double density(const Point& x, const Point& y) const;
  /// Multiplicative constant: numerically normalized, or the exponent-one constant.
  double constant() const { return constant_; }
  /// Closed form Γ(d/2) sin(πα) / π^{d/2+1} of the normalized constant (test reference).
  static double analytic_constant(int d, double alpha);
  /// Constant paired with the exponent-one kernel.
  static double exponent_one_constant(int d, double alpha);

  /// Integral of the density over r < |y - x| < hi (hi may be +inf).
  model::ExtendedReal radial_mass(double lo, double hi) const;
  model::ExtendedReal total_mass() const;
  /// Mass of {|y - x| > rho}.
  model::ExtendedReal tail_mass(double rho) const;

  int dim() const { return d_; }
  double alpha() const { return alpha_; }
  double r() const { return r_; }
  ExitVariant variant() const { return variant_; }

 private:
  double shape(double rho) const;
  double radial_integral(double lo, double hi, bool* divergent) const;

  int d_;
  double alpha_;
  double r_;
  ExitVariant variant_;
  double constant_ = 1.0;
};

/// Exit density of B(0, r) evaluated at y, |y| > r.
double exit_kernel_center(int d, double alpha, double r, const Point& y,
                          ExitVariant variant = ExitVariant::Normalized);

/// ξ(y) = (1 - |y - c|^2 / ρ^2)_+^4 (c0 + g·(y - c)). C^3 with compact support.
struct TestBump {
  Point center;
  double radius = 0.1;
  double c0 = 1.0;
  Point slope;  // g; dimension 0 means g = 0

  /// Throws PreconditionError when `nonnegative` is requested but |g| ρ > c0.
  static TestBump make(Point center, double radius, double c0 = 1.0, Point slope = {}, bool nonnegative = true);

  bool nonnegative() const;
  double operator()(const Point& y) const;
  double laplacian(const Point& y) const;
  /// u·(D²ξ(y))u.
  double hessian_quadratic(const Point& y, const Point& u) const;
  /// ∫ ξ dy.
  double integral() const;
};

struct Approx {
  double value = 0.0;
  double achieved_tol = 0.0;
};

/// (-Δ)^α ξ(x), i.e. minus the generator applied to ξ. α = 1 returns -Δξ(x).
Approx apply_minus_frac_laplacian(const TestBump& xi, const Point& x, double alpha, int angular_level = 8);

/// c_{d,α} = α 4^α Γ(d/2 + α) / (π^{d/2} Γ(1 - α)).
double frac_laplacian_constant(int d, double alpha);

}  // namespace smpkit::kernels
