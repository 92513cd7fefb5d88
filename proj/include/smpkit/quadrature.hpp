#pragma once

#include <functional>
#include <vector>

#include "smpkit/geometry.hpp"

namespace smpkit::quad {

/// Volume of the unit ball, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);
/// Surface area of the unit sphere, 2 pi^{d/2} / Gamma(d/2).
double unit_sphere_area(int d);

/// Fraction of the sphere S(p, s) lying inside the ball B(c, r) where |p - c| = dist.
double sphere_fraction_in_ball(int d, double s, double dist, double r);

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (cached, thread safe).
const Rule& gauss_legendre(int n);

/// Product rule on the unit sphere S^{d-1}; weights sum to unit_sphere_area(d).
/// `level` controls resolution (d=3: level Gauss nodes in cos(theta), 2*level in phi).
struct SphereRule {
  std::vector<Point> directions;
  std::vector<double> weights;
};
const SphereRule& sphere_rule(int d, int level);

struct QuadResult {
  double value = 0.0;
  bool divergent = false;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    divergent = divergent || o.divergent;
    return *this;
  }
};

struct SegmentOptions {
  int gauss_points = 12;
  int max_shells = 48;
  double shell_ratio = 0.5;
  double rel_eps = 1e-15;
};

using Fn1 = std::function<double(double)>;

/// Integral of f over [a, b]. Ends flagged singular are approached through
/// geometric shells whose ratio sequence extrapolates the remaining tail;
/// a non-decaying ratio marks the integral divergent.
QuadResult integrate_segment(const Fn1& f, double a, double b, bool singular_lo, bool singular_hi,
                             const SegmentOptions& opts = {});

struct StarOptions {
  int angular_level = 16;
  SegmentOptions segment{};
  /// Grade toward every ray end that lies on the domain boundary.
  bool grade_domain_boundary = false;
  /// Grade toward s = 0 (integrand singular at the star centre).
  bool grade_center = true;
  /// Spheres whose crossings split every ray (integrand kinks).
  std::vector<Ball> breaks;
};

using FnPoint = std::function<double(const Point&)>;

/// Integral of f over region ∩ B(center, s_max) in polar coordinates about `center`.
QuadResult integrate_star(const Point& center, const Region& region, double s_max, const FnPoint& f,
                          const StarOptions& opts = {});

/// C^3 cutoff: 1 on [0, 1/2], 0 on [1, inf).
double smooth_cutoff(double t);

/// Singular point of an integrand together with the radius of its private
/// neighbourhood. The integrand is split with smooth_cutoff so that each piece
/// is integrated in polar coordinates about its own singularity.
struct Singularity {
  Point where;
  double radius;
};

/// Integral of f over region ∩ B(center, s_max); `center` is treated as a
/// singular point, `extra` lists further singular points inside the region.
QuadResult integrate_with_singularities(const Point& center, const Region& region, double s_max,
                                        const std::vector<Point>& extra, const FnPoint& f,
                                        const StarOptions& opts = {});

/// Orthonormal basis of the hyperplane orthogonal to the unit vector e.
std::vector<Point> orthonormal_complement(const Point& e);

/// Integral of g over the sphere S(c, rho) with surface measure, in polar
/// coordinates about the axis direction `axis`. Nodes are graded toward the
/// axis point c + rho*axis when `grade_axis` is set (near-singular integrands).
QuadResult integrate_sphere(const Point& c, double rho, const Point& axis, const FnPoint& g, int level,
                            bool grade_axis, const SegmentOptions& seg = {});

/// Same as integrate_sphere restricted to polar angles theta in [theta_lo, theta_hi].
QuadResult integrate_sphere_band(const Point& c, double rho, const Point& axis, const FnPoint& g,
                                 int level, double theta_lo, double theta_hi, bool grade_axis,
                                 const SegmentOptions& seg = {});

}  // namespace smpkit::quad
