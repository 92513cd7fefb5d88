#include "smpkit/kernels.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "smpkit/errors.hpp"
#include "smpkit/quadrature.hpp"

namespace smpkit::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

double brownian_constant(int d) { return std::tgamma(0.5 * d - 1.0) / (4.0 * std::pow(kPi, 0.5 * d)); }

double stable_kappa(int d, double alpha) {
  double ga = std::tgamma(alpha);
  return std::tgamma(0.5 * d) / (std::pow(4.0, alpha) * std::pow(kPi, 0.5 * d) * ga * ga);
}

// A = |x-y|^2 and B = (R^2-|x|^2)(R^2-|y|^2)/R^2, so that the image distance is A + B.
struct ImagePair {
  double A;
  double B;
};

ImagePair image_pair(double R, const Point& x, const Point& y) {
  double R2 = R * R;
  return {norm2(x - y), (R2 - norm2(x)) * (R2 - norm2(y)) / R2};
}

double brownian_from_pair(int d, const ImagePair& p) {
  double w = p.B / p.A;
  if (d == 2) return std::log1p(w) / (4.0 * kPi);
  if (d == 3) {
    // 1 - (1 + w)^{-1/2} without cancellation.
    double q = std::sqrt(1.0 + w);
    return w / (4.0 * kPi * std::sqrt(p.A) * q * (q + 1.0));
  }
  double e = 0.5 * (2.0 - d);
  return brownian_constant(d) * std::pow(p.A, e) * -std::expm1(e * std::log1p(w));
}

double stable_from_pair(int d, double alpha, const ImagePair& p) {
  double a = alpha;
  double b = 0.5 * d - alpha;
  double w = p.B / p.A;
  double x = w / (1.0 + w);
  double incomplete;
  if (x < 0.5) {
    incomplete = boost::math::beta(a, b, x);
  } else {
    incomplete = boost::math::beta(a, b) - boost::math::beta(b, a, 1.0 / (1.0 + w));
  }
  return stable_kappa(d, alpha) * std::pow(p.A, 0.5 * (2.0 * alpha - d)) * incomplete;
}

void check_in_ball(double R, const Point& x, const Point& y) {
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  if (x.dim() != y.dim()) throw DomainError("point dimensions differ");
  if (!(norm2(x) < R * R) || !(norm2(y) < R * R)) throw DomainError("Green kernel: point outside B(0, R)");
  if (x == y) throw SingularityError("Green kernel evaluated at x == y");
}

}  // namespace

double riesz_constant(int d, double alpha) {
  return std::tgamma(0.5 * d - alpha) / (std::pow(4.0, alpha) * std::pow(kPi, 0.5 * d) * std::tgamma(alpha));
}

double green_ball_brownian(int d, double R, const Point& x, const Point& y) {
  if (d < 2 || x.dim() != d) throw DomainError("green_ball_brownian: dimension mismatch");
  check_in_ball(R, x, y);
  return brownian_from_pair(d, image_pair(R, x, y));
}

double green_ball_stable(int d, double alpha, double R, const Point& x, const Point& y) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(2.0 * alpha < d)) throw DomainError("green_ball_stable: need 0 < α < 1, 2α < d");
  if (x.dim() != d) throw DomainError("green_ball_stable: dimension mismatch");
  check_in_ball(R, x, y);
  return stable_from_pair(d, alpha, image_pair(R, x, y));
}

double expected_residence(int d, double R, const Point& x) {
  if (!(norm2(x) < R * R)) throw DomainError("expected_residence: x outside B(0, R)");
  return (R * R - norm2(x)) / (2.0 * d);
}

double expected_residence_stable(int d, double alpha, double R, const Point& x) {
  if (!(norm2(x) < R * R)) throw DomainError("expected_residence_stable: x outside B(0, R)");
  if (alpha == 1.0) return expected_residence(d, R, x);
  double c = std::tgamma(0.5 * d) /
             (std::pow(4.0, alpha) * std::tgamma(1.0 + alpha) * std::tgamma(0.5 * d + alpha));
  return c * std::pow(R * R - norm2(x), alpha);
}

GreenKernel GreenKernel::for_operator(const model::OperatorSpec& op) {
  const Ball* b = op.domain.as_ball();
  if (!b) throw PreconditionError("closed-form Green kernel needs a ball domain");
  GreenKernel k;
  k.op_ = op;
  k.center_ = b->center;
  k.radius_ = b->radius;
  if (op.brownian()) {
    k.form_ = GreenForm::BallBrownianImage;
  } else {
    if (!(2.0 * op.alpha < op.dim)) throw PreconditionError("fractional Green kernel needs 2α < d");
    k.form_ = GreenForm::BallStableClosedForm;
  }
  return k;
}

GreenKernel GreenKernel::riesz(int d, double alpha) {
  if (!(2.0 * alpha < d)) throw PreconditionError("Riesz kernel needs 2α < d");
  GreenKernel k;
  k.op_.kind = alpha == 1.0 ? model::OperatorKind::BrownianLaplacian : model::OperatorKind::FractionalLaplacian;
  k.op_.alpha = alpha;
  k.op_.dim = d;
  k.op_.domain = DomainSpec::ball(Point::zero(d), std::numeric_limits<double>::infinity());
  k.form_ = GreenForm::WholeSpaceRiesz;
  return k;
}

double GreenKernel::operator()(const Point& x, const Point& y) const {
  const int d = op_.dim;
  if (form_ == GreenForm::WholeSpaceRiesz) {
    double r2 = norm2(x - y);
    if (r2 == 0.0) return std::numeric_limits<double>::infinity();
    return riesz_constant(d, op_.alpha) * std::pow(r2, 0.5 * (2.0 * op_.alpha - d));
  }
  Point xs = x - center_;
  Point ys = y - center_;
  double R2 = radius_ * radius_;
  if (norm2(xs) >= R2 || norm2(ys) >= R2) return 0.0;
  ImagePair p = image_pair(radius_, xs, ys);
  if (p.A == 0.0) return std::numeric_limits<double>::infinity();
  return form_ == GreenForm::BallBrownianImage ? brownian_from_pair(d, p) : stable_from_pair(d, op_.alpha, p);
}

SingularityKind GreenKernel::singularity() const {
  return (op_.dim == 2 && op_.alpha == 1.0) ? SingularityKind::Log : SingularityKind::Power;
}

double GreenKernel::exponent() const {
  if (singularity() == SingularityKind::Log) return 0.0;
  return op_.dim - 2.0 * op_.alpha;
}

double GreenKernel::leading_constant() const {
  if (singularity() == SingularityKind::Log) return 1.0 / (2.0 * kPi);
  return riesz_constant(op_.dim, op_.alpha);
}

ExitKernel::ExitKernel(int d, double alpha, double r, ExitVariant variant)
    : d_(d), alpha_(alpha), r_(r), variant_(variant) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("exit kernel: α in (0, 1) required");
  if (!(2.0 * alpha < d)) throw DomainError("exit kernel: 2α < d required");
  if (!(r > 0.0)) throw DomainError("exit kernel: r > 0 required");
  if (variant == ExitVariant::AsPrinted) {
    constant_ = exponent_one_constant(d, alpha);
  } else {
    constant_ = 1.0;
    bool divergent = false;
    double m = radial_integral(r, std::numeric_limits<double>::infinity(), &divergent);
    if (divergent || !(m > 0.0)) throw ConvergenceError("exit kernel normalization failed", m);
    constant_ = 1.0 / m;
  }
}

double ExitKernel::analytic_constant(int d, double alpha) {
  return std::tgamma(0.5 * d) * std::sin(kPi * alpha) / std::pow(kPi, 0.5 * d + 1.0);
}

double ExitKernel::exponent_one_constant(int d, double alpha) {
  return std::pow(kPi, 1.0 + 0.5 * d) * std::tgamma(0.5 * d) * std::sin(kPi * alpha);
}

double ExitKernel::shape(double rho) const {
  double gap = (rho - r_) * (rho + r_);
  double e = variant_ == ExitVariant::AsPrinted ? 1.0 : alpha_;
  return std::pow(r_, 2.0 * alpha_) * std::pow(gap, -e) * std::pow(rho, -d_);
}

double ExitKernel::density(double rho) const {
  if (!(rho > r_)) throw DomainError("exit kernel: |y - x| > r required");
  return constant_ * shape(rho);
}

double ExitKernel::density(const Point& x, const Point& y) const { return density(distance(x, y)); }

double ExitKernel::radial_integral(double lo, double hi, bool* divergent) const {
  const double area = quad::unit_sphere_area(d_);
  auto radial = [&](double rho) { return rho > r_ ? area * std::pow(rho, d_ - 1) * constant_ * shape(rho) : 0.0; };
  // Near r the offset t = ρ - r is the variable, so the gap (ρ - r)(ρ + r) keeps full precision.
  const double e = variant_ == ExitVariant::AsPrinted ? 1.0 : alpha_;
  auto near = [&](double t) {
    if (!(t > 0.0)) return 0.0;
    double rho = r_ + t;
    return area * constant_ * std::pow(r_, 2.0 * alpha_) * std::pow(t * (rho + r_), -e) / rho;
  };
  quad::QuadResult q;
  double split = 2.0 * r_;
  if (lo < split) {
    double b = std::min(hi, split);
    q += quad::integrate_segment(near, 0.0, b - r_, true, false);
    if (lo > r_) {
      auto head = quad::integrate_segment(near, 0.0, lo - r_, true, false);
      q.value -= head.value;
      q.divergent = q.divergent || head.divergent;
    }
  }
  double a = std::max(lo, split);
  if (hi > a) {
    if (std::isinf(hi)) {
      // ρ = a / τ maps (a, ∞) onto (0, 1].
      auto mapped = [&](double tau) { return tau > 0.0 ? radial(a / tau) * a / (tau * tau) : 0.0; };
      q += quad::integrate_segment(mapped, 0.0, 1.0, true, false);
    } else {
      q += quad::integrate_segment(radial, a, hi, false, false);
    }
  }
  *divergent = q.divergent;
  return q.value;
}

model::ExtendedReal ExitKernel::radial_mass(double lo, double hi) const {
  lo = std::max(lo, r_);
  if (!(hi > lo)) return model::ExtendedReal::finite(0.0);
  bool divergent = false;
  double v = radial_integral(lo, hi, &divergent);
  return divergent ? model::ExtendedReal::infinity() : model::ExtendedReal::finite(v);
}

model::ExtendedReal ExitKernel::total_mass() const {
  return radial_mass(r_, std::numeric_limits<double>::infinity());
}

model::ExtendedReal ExitKernel::tail_mass(double rho) const {
  return radial_mass(rho, std::numeric_limits<double>::infinity());
}

double exit_kernel_center(int d, double alpha, double r, const Point& y, ExitVariant variant) {
  if (!(norm(y) > r)) throw DomainError("exit_kernel_center: |y| > r required");
  // Normalized constants do not depend on r, so cache per (d, α).
  if (variant == ExitVariant::Normalized) {
    thread_local int cd = -1;
    thread_local double ca = -1.0;
    thread_local double cc = 0.0;
    if (cd != d || ca != alpha) {
      cc = ExitKernel(d, alpha, 1.0, variant).constant();
      cd = d;
      ca = alpha;
    }
    double rho = norm(y);
    return cc * std::pow(r, 2.0 * alpha) * std::pow((rho - r) * (rho + r), -alpha) * std::pow(rho, -d);
  }
  return ExitKernel(d, alpha, r, variant).density(norm(y));
}

TestBump TestBump::make(Point center, double radius, double c0, Point slope, bool nonnegative) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  TestBump b{std::move(center), radius, c0, std::move(slope)};
  if (b.slope.dim() != 0 && b.slope.dim() != b.center.dim()) throw DomainError("bump slope dimension");
  if (nonnegative && !b.nonnegative()) throw PreconditionError("bump is not nonnegative: need |g| ρ <= c0");
  return b;
}

bool TestBump::nonnegative() const {
  double g = slope.dim() == 0 ? 0.0 : norm(slope);
  return c0 >= g * radius;
}

double TestBump::operator()(const Point& y) const {
  Point z = y - center;
  double q = 1.0 - norm2(z) / (radius * radius);
  if (q <= 0.0) return 0.0;
  double p = c0 + (slope.dim() == 0 ? 0.0 : dot(slope, z));
  double q2 = q * q;
  return q2 * q2 * p;
}

double TestBump::laplacian(const Point& y) const {
  const int d = y.dim();
  Point z = y - center;
  double r2 = radius * radius;
  double s2 = norm2(z);
  double q = 1.0 - s2 / r2;
  if (q <= 0.0) return 0.0;
  double gz = slope.dim() == 0 ? 0.0 : dot(slope, z);
  double p = c0 + gz;
  double lap_phi = -8.0 / r2 * (d * q * q * q - 6.0 * q * q * s2 / r2);
  return p * lap_phi - 16.0 * q * q * q * gz / r2;
}

double TestBump::hessian_quadratic(const Point& y, const Point& u) const {
  Point z = y - center;
  double r2 = radius * radius;
  double q = 1.0 - norm2(z) / r2;
  if (q <= 0.0) return 0.0;
  double gz = slope.dim() == 0 ? 0.0 : dot(slope, z);
  double gu = slope.dim() == 0 ? 0.0 : dot(slope, u);
  double uz = dot(u, z);
  double uu = norm2(u);
  double phi_uu = -8.0 / r2 * (q * q * q * uu - 6.0 * q * q * uz * uz / r2);
  double phi_u = -8.0 * q * q * q * uz / r2;
  return (c0 + gz) * phi_uu + 2.0 * phi_u * gu;
}

double TestBump::integral() const {
  const int d = center.dim();
  return c0 * std::pow(radius, d) * 0.5 * quad::unit_sphere_area(d) * boost::math::beta(0.5 * d, 5.0);
}

double frac_laplacian_constant(int d, double alpha) {
  return alpha * std::pow(4.0, alpha) * std::tgamma(0.5 * d + alpha) / (std::pow(kPi, 0.5 * d) * std::tgamma(1.0 - alpha));
}

Approx apply_minus_frac_laplacian(const TestBump& xi, const Point& x, double alpha, int angular_level) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("apply_minus_frac_laplacian: α in (0, 1]");
  if (alpha == 1.0) return {-xi.laplacian(x), 0.0};
  const int d = x.dim();
  const double fx = xi(x);
  const double c = frac_laplacian_constant(d, alpha);
  const double reach = distance(x, xi.center) + xi.radius;

  // Below s0 the second difference is replaced by its Taylor term -s^2 u·Hu,
  // which also avoids cancellation in 2ξ(x) - ξ(x+su) - ξ(x-su).
  const double s0 = 1e-3 * xi.radius;
  auto evaluate = [&](int level) {
    const quad::SphereRule& sr = quad::sphere_rule(d, level);
    double total = 0.0;
    bool divergent = false;
    std::vector<double> cuts;
    for (std::size_t k = 0; k < sr.directions.size(); ++k) {
      const Point& u = sr.directions[k];
      auto radial = [&](double s) {
        double second = 2.0 * fx - xi(x + u * s) - xi(x - u * s);
        return second * std::pow(s, -1.0 - 2.0 * alpha);
      };
      double near = -xi.hessian_quadratic(x, u) * std::pow(s0, 2.0 - 2.0 * alpha) / (2.0 - 2.0 * alpha);
      cuts.clear();
      ray_sphere_crossings(x, u, xi.center, xi.radius, cuts);
      ray_sphere_crossings(x, u * -1.0, xi.center, xi.radius, cuts);
      std::sort(cuts.begin(), cuts.end());
      double a = s0;
      quad::QuadResult ray{near, false};
      for (double cut : cuts) {
        if (cut <= a || cut >= reach) continue;
        ray += quad::integrate_segment(radial, a, cut, false, false);
        a = cut;
      }
      ray += quad::integrate_segment(radial, a, reach, false, false);
      total += sr.weights[k] * ray.value;
      divergent = divergent || ray.divergent;
    }
    if (divergent) throw ConvergenceError("apply_minus_frac_laplacian: radial integral did not converge", 0.0);
    double tail = quad::unit_sphere_area(d) * 2.0 * fx * std::pow(reach, -2.0 * alpha) / (2.0 * alpha);
    return 0.5 * c * (total + tail);
  };
  double coarse = evaluate(angular_level);
  double fine = evaluate(2 * angular_level);
  return {fine, std::abs(fine - coarse)};
}

}  // namespace smpkit::kernels
