#include <doctest.h>

#include <cmath>
#include <numbers>

#include "smpkit/quadrature.hpp"

using namespace smpkit;
using std::numbers::pi;

TEST_CASE("ball volume and sphere area constants") {
  CHECK(quad::unit_ball_volume(2) == doctest::Approx(pi));
  CHECK(quad::unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0));
  CHECK(quad::unit_sphere_area(2) == doctest::Approx(2.0 * pi));
  CHECK(quad::unit_sphere_area(3) == doctest::Approx(4.0 * pi));
  for (int d = 2; d <= 6; ++d) CHECK(quad::unit_sphere_area(d) == doctest::Approx(d * quad::unit_ball_volume(d)));
}

TEST_CASE("Gauss-Legendre is exact up to degree 2n-1") {
  const auto& r = quad::gauss_legendre(8);
  double s14 = 0.0, s15 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s14 += r.weights[i] * std::pow(r.nodes[i], 14);
    s15 += r.weights[i] * std::pow(r.nodes[i], 15);
  }
  CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
  CHECK(std::abs(s15) < 1e-14);
}

TEST_CASE("sphere rule moments") {
  for (int d : {2, 3, 4}) {
    const auto& s = quad::sphere_rule(d, 12);
    double w = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < s.weights.size(); ++i) {
      w += s.weights[i];
      m2 += s.weights[i] * s.directions[i][0] * s.directions[i][0];
    }
    CHECK(w == doctest::Approx(quad::unit_sphere_area(d)).epsilon(1e-10));
    CHECK(m2 == doctest::Approx(quad::unit_sphere_area(d) / d).epsilon(1e-10));
  }
}

TEST_CASE("segment integration with endpoint singularities") {
  auto q = quad::integrate_segment([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, true, false);
  CHECK_FALSE(q.divergent);
  CHECK(q.value == doctest::Approx(2.0).epsilon(1e-8));
  auto q2 = quad::integrate_segment([](double x) { return std::log(1.0 - x); }, 0.0, 1.0, false, true);
  CHECK(q2.value == doctest::Approx(-1.0).epsilon(1e-8));
  auto d = quad::integrate_segment([](double x) { return 1.0 / x; }, 0.0, 1.0, true, false);
  CHECK(d.divergent);
}

TEST_CASE("star quadrature of radial powers over the unit ball") {
  auto D = DomainSpec::unit_ball(3);
  auto q = quad::integrate_star(Point::zero(3), Region(D), 1.0, [](const Point& y) { return 1.0 / norm2(y); });
  CHECK_FALSE(q.divergent);
  CHECK(q.value == doctest::Approx(4.0 * pi).epsilon(1e-8));
  auto q3 = quad::integrate_star(Point::zero(3), Region(D), 1.0, [](const Point& y) { return std::pow(norm(y), -3.0); });
  CHECK(q3.divergent);
}

TEST_CASE("Newtonian potential of a uniform ball at an interior point") {
  // ∫_{B(c,R)} |y - p|^{-1} dy = 2π (R^2 - |p - c|^2 / 3) for |p - c| <= R.
  Point c{0.1, 0.1, 0.0}, p{0.3, 0.0, 0.0};
  const double R = 0.5;
  Region reg;
  reg.inside_ball(c, R);
  double exact = 2.0 * pi * (R * R - norm2(p - c) / 3.0);
  double prev_err = 1.0;
  for (int level : {16, 32, 64}) {
    quad::StarOptions o;
    o.angular_level = level;
    auto q = quad::integrate_with_singularities(c, reg, R, {p}, [&](const Point& y) { return 1.0 / distance(y, p); }, o);
    double err = std::abs(q.value - exact) / exact;
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-7);
}

TEST_CASE("sphere fraction inside a ball") {
  CHECK(quad::sphere_fraction_in_ball(3, 0.1, 0.2, 1.0) == doctest::Approx(1.0));
  CHECK(quad::sphere_fraction_in_ball(3, 3.0, 0.5, 1.0) == doctest::Approx(0.0));
  double s = 0.6, dist = 0.7, r = 1.0;
  CHECK(quad::sphere_fraction_in_ball(3, s, dist, r) ==
        doctest::Approx((r * r - (dist - s) * (dist - s)) / (4.0 * s * dist)));
}

TEST_CASE("smooth cutoff is a monotone transition from 1 to 0") {
  CHECK(quad::smooth_cutoff(0.0) == 1.0);
  CHECK(quad::smooth_cutoff(0.5) == doctest::Approx(1.0));
  CHECK(quad::smooth_cutoff(1.0) == doctest::Approx(0.0));
  CHECK(quad::smooth_cutoff(2.0) == 0.0);
  double prev = 1.0;
  for (int k = 0; k <= 100; ++k) {
    double v = quad::smooth_cutoff(0.5 + 0.005 * k);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("sphere integrals reproduce shell potentials") {
  // Mean of |y - q|^{-1} over S(0,1) is 1 for |q| < 1 and 1/|q| outside.
  Point axis{1.0, 0.0, 0.0};
  auto inner = quad::integrate_sphere(Point::zero(3), 1.0, axis, [](const Point& y) { return 1.0 / distance(y, Point{0.5, 0.0, 0.0}); }, 16, true);
  CHECK(inner.value == doctest::Approx(4.0 * pi).epsilon(1e-8));
  auto outer = quad::integrate_sphere(Point::zero(3), 1.0, axis, [](const Point& y) { return 1.0 / distance(y, Point{2.0, 0.0, 0.0}); }, 16, false);
  CHECK(outer.value == doctest::Approx(2.0 * pi).epsilon(1e-10));
  auto area = quad::integrate_sphere(Point{0.2, 0.0, 0.0}, 0.3, axis, [](const Point&) { return 1.0; }, 8, false);
  CHECK(area.value == doctest::Approx(4.0 * pi * 0.09).epsilon(1e-12));
}
