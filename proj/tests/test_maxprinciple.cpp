#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "smpkit/catalog.hpp"
#include "smpkit/errors.hpp"
#include "smpkit/maxprinciple.hpp"

using namespace smpkit;
using namespace smpkit::mp;

namespace {
const auto kBall = DomainSpec::unit_ball(3);
const auto kLap = model::OperatorSpec::laplacian(kBall);
const Point kO = Point::zero(3);
const model::RadiiSchedule kClassifyRadii{0.5, 0.05, 4};

Fn sq = [](const Point& y) { return norm2(y); };
}  // namespace

TEST_CASE("ball and sphere constants") {
  CHECK(ball_volume_constant(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  for (int d = 2; d <= 6; ++d) CHECK(sphere_area_constant(d) / ball_volume_constant(d) == doctest::Approx(d));
}

TEST_CASE("volume averages reproduce harmonic functions and the mean of |y|^2") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Fn harm = [](const Point& y) { return y[0] * y[1] - 2.0 * y[2] + y[0] * y[0] - y[1] * y[1]; };
  for (int k = 0; k < 50; ++k) {
    Point x{u(gen), u(gen), u(gen)};
    double r = 0.05 + 0.4 * (u(gen) + 0.5);
    CHECK(volume_average(harm, x, r).value == doctest::Approx(harm(x)).epsilon(1e-10));
    // Mean of |y|^2 over B(x, r) in d = 3 is |x|^2 + 3 r^2 / 5.
    CHECK(volume_average(sq, x, r).value == doctest::Approx(norm2(x) + 0.6 * r * r).epsilon(1e-12));
  }
}

TEST_CASE("fine limits") {
  auto fl = fine_limit(sq, kO, kLap, model::RadiiSchedule{1e-2, 1e-4, 8});
  CHECK_FALSE(fl.undecided);
  CHECK(std::abs(fl.limit) < 1e-8);
  CHECK(fl.residual < 1e-8);

  Point x{0.3, 0.1, -0.2};
  auto fx = fine_limit(sq, x, kLap, model::RadiiSchedule{1e-2, 1e-4, 8});
  CHECK(fx.limit == doctest::Approx(norm2(x)).epsilon(1e-10));

  auto frac = model::OperatorSpec::fractional(0.5, kBall);
  FineLimitOptions o;
  o.rel_tol = 1e-4;
  auto ff = fine_limit(sq, Point{0.3, 0.0, 0.0}, frac, model::RadiiSchedule{1e-2, 1e-4, 8}, o);
  CHECK_FALSE(ff.undecided);
  CHECK(ff.limit == doctest::Approx(0.09).epsilon(1e-5));
}

TEST_CASE("fractional exit averages") {
  Fn one = [](const Point&) { return 1.0; };
  CHECK(fractional_average(one, kO, 0.3, 0.5).value == doctest::Approx(1.0).epsilon(1e-8));
  // Restricted to D the exit law loses the mass that jumps out.
  double inside = fractional_average(one, kO, 0.3, 0.5, kernels::ExitVariant::Normalized, &kBall).value;
  CHECK(inside < 1.0);
  CHECK(inside > 0.0);
}

TEST_CASE("classification of points by local Green integrals") {
  auto inN = classify_point(kO, model::MeasureSpec::power(2.0, kO, 6.0), kLap, kClassifyRadii);
  CHECK(inN.verdict == Verdict::InN);
  CHECK(inN.table.fit.log_coef.value > 5.0 * inN.table.fit.log_coef.stderr_);

  auto inE = classify_point(kO, model::MeasureSpec::power(1.0, kO), kLap, kClassifyRadii);
  CHECK(inE.verdict == Verdict::InE);
  CHECK(inE.table.J.back() == doctest::Approx(0.375).epsilon(1e-3));

  auto flat = classify_point(Point{0.2, 0.1, 0.0}, model::MeasureSpec::constant(1.0), kLap, kClassifyRadii);
  CHECK(flat.verdict == Verdict::InE);
}

TEST_CASE("bump families stay inside the domain") {
  for (bool tilted : {false, true}) {
    auto bumps = bump_family(kBall, 3, 0.3, tilted);
    CHECK_FALSE(bumps.empty());
    for (const auto& b : bumps) {
      CHECK(norm(b.center) + b.radius < 1.0);
      CHECK(b.nonnegative());
    }
  }
}

TEST_CASE("weak supersolution test") {
  auto nu = model::MeasureSpec::power(2.0, kO, 6.0);
  auto bumps = bump_family(kBall, 3, 0.3, true);
  WeakTestOptions o;
  o.u_singular = {kO};
  auto pass = weak_supersolution_test(sq, nu, kLap, bumps, o);
  CHECK(pass.pass);
  for (const auto& v : pass.values) CHECK(std::abs(v.value) < 1e-6);

  // Without the potential, |x|^2 is subharmonic and every bump sees -6∫ξ.
  auto fail = weak_supersolution_test(sq, model::MeasureSpec::zero(), kLap, bumps);
  CHECK_FALSE(fail.pass);
  for (const auto& v : fail.values) CHECK(v.value == doctest::Approx(-6.0 * v.bump.integral()).epsilon(1e-6));
}

TEST_CASE("dichotomy check on closed-form candidates") {
  auto nu = model::MeasureSpec::power(2.0, kO, 6.0);
  auto grid = grid_points(kBall, 5, 0.1);
  CHECK(grid.size() == 27);

  auto example = catalog::make("paper-example-x2", {}, kLap, nu);
  auto rep = dichotomy_check(example, nu, kLap, grid);
  CHECK(rep.verdict == DichotomyVerdict::Consistent);
  REQUIRE(rep.zero_set.size() == 1);
  CHECK(norm(rep.grid[rep.zero_set[0]].x) == 0.0);
  REQUIRE(rep.classifications.size() == 1);
  CHECK(rep.classifications[0].verdict == Verdict::InN);

  auto res = catalog::make("residence-ball", {}, kLap, model::MeasureSpec::zero());
  auto r2 = dichotomy_check(res, model::MeasureSpec::zero(), kLap, grid);
  CHECK(r2.verdict == DichotomyVerdict::Consistent);
  CHECK(r2.zero_set.empty());

  auto zero = catalog::make("zero", {}, kLap, model::MeasureSpec::zero());
  CHECK(dichotomy_check(zero, model::MeasureSpec::zero(), kLap, grid).verdict == DichotomyVerdict::Trivial);

  // A subsolution is rejected before any fine limit is computed.
  auto bad = catalog::make("paper-example-x2", {}, kLap, model::MeasureSpec::zero());
  CHECK_THROWS_AS(dichotomy_check(bad, model::MeasureSpec::zero(), kLap, grid), PreconditionError);
}
