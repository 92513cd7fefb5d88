#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smpkit/model.hpp"

using namespace smpkit;
using namespace smpkit::model;
using std::numbers::pi;

namespace {
bool names(const std::vector<Violation>& v, const std::string& field) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == field; });
}
}  // namespace

TEST_CASE("domain and operator validation") {
  CHECK(validate(DomainSpec::unit_ball(3)).empty());
  CHECK(names(validate(DomainSpec::ball(Point::zero(3), -1.0)), "domain.radius"));
  CHECK(names(validate(DomainSpec{Annulus{Point::zero(2), 1.0, 0.5}}), "domain.r_out"));

  CHECK(validate(OperatorSpec::laplacian(DomainSpec::unit_ball(3))).empty());
  CHECK(validate(OperatorSpec::fractional(0.5, DomainSpec::unit_ball(2))).empty());
  CHECK(names(validate(OperatorSpec::fractional(1.2, DomainSpec::unit_ball(3))), "alpha"));
  OperatorSpec bad = OperatorSpec::laplacian(DomainSpec::unit_ball(3));
  bad.alpha = 0.5;
  CHECK(names(validate(bad), "alpha"));
}

TEST_CASE("measure validation") {
  auto D = DomainSpec::unit_ball(3);
  CHECK(validate(MeasureSpec::power(2.0, Point::zero(3), 6.0), D).empty());
  CHECK_FALSE(validate(MeasureSpec::power(2.0, Point::zero(3), -1.0), D).empty());
  CHECK_FALSE(validate(MeasureSpec::power(2.0, Point::zero(2)), D).empty());
  CHECK_FALSE(validate(MeasureSpec::sphere(Point::zero(3), 1.5), D).empty());
  CHECK_FALSE(validate(MeasureSpec::constant(-1.0), D).empty());
}

TEST_CASE("radii schedules") {
  RadiiSchedule g{1.0, 0.01, 3, Spacing::Geometric};
  auto v = g.values();
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(0.1));
  CHECK(v[2] == doctest::Approx(0.01));
  RadiiSchedule l{1.0, 0.5, 3, Spacing::Linear};
  CHECK(l.values()[1] == doctest::Approx(0.75));
  CHECK_FALSE(validate(RadiiSchedule{0.1, 0.2, 3}).empty());
  CHECK_FALSE(validate(RadiiSchedule{0.1, 0.01, 1}).empty());
}

TEST_CASE("measure of balls in closed form") {
  auto D = DomainSpec::unit_ball(3);
  auto o = Point::zero(3);
  CHECK(measure_of_ball(MeasureSpec::constant(1.0), D, o, 1.0).mass.value == doctest::Approx(4.0 * pi / 3.0));
  // ∫_{B(0,1)} |y|^{-2} dy = 4π.
  CHECK(measure_of_ball(MeasureSpec::power(2.0, o), D, o, 1.0).mass.value == doctest::Approx(4.0 * pi));
  // Surface measure of S(0, 1/2).
  CHECK(measure_of_ball(MeasureSpec::sphere(o, 0.5), D, o, 1.0).mass.value == doctest::Approx(pi));
  CHECK(measure_of_ball(MeasureSpec::power(3.0, o), D, o, 0.5).mass.infinite);
}

TEST_CASE("measure of a ball crossing the boundary is a lens volume") {
  auto D = DomainSpec::unit_ball(3);
  const double R = 1.0, r = 0.5, d = 0.8;
  double lens = pi * (R + r - d) * (R + r - d) * (d * d + 2 * d * r - 3 * r * r + 2 * d * R + 6 * r * R - 3 * R * R) / (12 * d);
  auto m = measure_of_ball(MeasureSpec::constant(1.0), D, Point{d, 0.0, 0.0}, r);
  CHECK_FALSE(m.closed_form);
  CHECK(m.achieved_tol < 1e-3);
  CHECK(std::abs(m.mass.value - lens) <= m.achieved_tol);
}

TEST_CASE("densities, poles and multilinear tables") {
  auto D = DomainSpec::unit_ball(3);
  auto nu = MeasureSpec::power(1.0, Point{0.2, 0.0, 0.0}, 2.0) + MeasureSpec::constant(0.5);
  CHECK(nu.density(Point{0.7, 0.0, 0.0}, D) == doctest::Approx(2.0 / 0.5 + 0.5));
  REQUIRE(nu.poles().size() == 1);
  CHECK(nu.has_density());
  CHECK_FALSE(nu.has_surface());
  CHECK(nu.scaled(2.0).density(Point{0.7, 0.0, 0.0}, D) == doctest::Approx(9.0));

  TabulatedDensity t{Box{Point{0.0, 0.0}, Point{1.0, 1.0}}, {3, 4}, {}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) t.values.push_back(1.0 + 2.0 * (i / 2.0) + 3.0 * (j / 3.0));
  CHECK(t(Point{0.3, 0.7}) == doctest::Approx(1.0 + 0.6 + 2.1));
  CHECK(t(Point{1.5, 0.5}) == 0.0);
}

TEST_CASE("extended reals keep divergence apart") {
  auto a = ExtendedReal::finite(1.0) + ExtendedReal::finite(2.0);
  CHECK_FALSE(a.infinite);
  CHECK(a.value == 3.0);
  CHECK((a + ExtendedReal::infinity()).infinite);
}
