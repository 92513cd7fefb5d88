#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "smpkit/errors.hpp"
#include "smpkit/kernels.hpp"
#include "smpkit/quadrature.hpp"

using namespace smpkit;
using namespace smpkit::kernels;
using std::numbers::pi;

TEST_CASE("Brownian ball Green function closed values") {
  // Generator Δ: G(0, y) = (|y|^{-1} - 1) / (4π) on B(0, 1).
  CHECK(green_ball_brownian(3, 1.0, Point::zero(3), Point{0.5, 0.0, 0.0}) == doctest::Approx(1.0 / (4.0 * pi)));
  // d = 2: G(0, y) = log(1/|y|) / (2π).
  CHECK(green_ball_brownian(2, 1.0, Point::zero(2), Point{0.5, 0.0}) == doctest::Approx(std::log(2.0) / (2.0 * pi)));
  CHECK_THROWS_AS(green_ball_brownian(3, 1.0, Point{0.1, 0.0, 0.0}, Point{0.1, 0.0, 0.0}), SingularityError);
  CHECK(riesz_constant(3, 1.0) == doctest::Approx(1.0 / (4.0 * pi)));
}

TEST_CASE("Green functions are symmetric, positive and vanish on the boundary") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-0.55, 0.55);
  auto D = DomainSpec::unit_ball(3);
  for (double alpha : {1.0, 0.5, 0.8}) {
    auto op = alpha == 1.0 ? model::OperatorSpec::laplacian(D) : model::OperatorSpec::fractional(alpha, D);
    auto G = GreenKernel::for_operator(op);
    for (int k = 0; k < 200; ++k) {
      Point x{u(gen), u(gen), u(gen)}, y{u(gen), u(gen), u(gen)};
      double gxy = G(x, y);
      CHECK(gxy > 0.0);
      CHECK(gxy == doctest::Approx(G(y, x)).epsilon(1e-12));
    }
    CHECK(G(Point{0.2, 0.0, 0.0}, Point{0.0, 1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(G(Point{0.2, 0.0, 0.0}, Point{0.0, 1.5, 0.0}) == 0.0);
  }
  CHECK_THROWS_AS(GreenKernel::for_operator(model::OperatorSpec::laplacian(DomainSpec{Box{Point{0.0, 0.0}, Point{1.0, 1.0}}})),
                  PreconditionError);
}

TEST_CASE("integrated Green function equals the expected residence time") {
  for (int d : {2, 3}) {
    auto D = DomainSpec::unit_ball(d);
    Point x = Point::axis(d, 0, 0.3);
    auto G = GreenKernel::for_operator(model::OperatorSpec::laplacian(D));
    auto q = quad::integrate_star(x, Region(D), 2.0, [&](const Point& y) { return G(x, y); });
    CHECK(q.value == doctest::Approx(expected_residence(d, 1.0, x)).epsilon(1e-7));
    CHECK(expected_residence(d, 1.0, x) == doctest::Approx((1.0 - 0.09) / (2.0 * d)));
    for (double a : {0.25, 0.5, 0.75}) {
      auto Gs = GreenKernel::for_operator(model::OperatorSpec::fractional(a, D));
      quad::StarOptions o;
      o.grade_domain_boundary = true;
      auto qs = quad::integrate_star(x, Region(D), 2.0, [&](const Point& y) { return Gs(x, y); }, o);
      CHECK(qs.value == doctest::Approx(expected_residence_stable(d, a, 1.0, x)).epsilon(1e-5));
    }
  }
}

TEST_CASE("normalized exit kernel is a probability law with the analytic constant") {
  for (int d : {2, 3})
    for (double a : {0.25, 0.5, 0.75}) {
      ExitKernel k(d, a, 1.0);
      CHECK(k.constant() == doctest::Approx(ExitKernel::analytic_constant(d, a)).epsilon(1e-6));
      auto m = k.total_mass();
      REQUIRE_FALSE(m.infinite);
      CHECK(m.value == doctest::Approx(1.0).epsilon(1e-8));
      // Radial tail P(ρ > s r) = I_{1/s^2}(α, 1 - α).
      for (double s : {1.0001, 1.01, 1.1, 2.0, 5.0})
        CHECK(k.tail_mass(s).value == doctest::Approx(boost::math::ibeta(a, 1.0 - a, 1.0 / (s * s))).epsilon(1e-6));
    }
  ExitKernel half(2, 0.5, 1.0);
  CHECK(half.tail_mass(2.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("the normalized constant does not depend on the radius") {
  for (double r : {0.5, 2.0}) CHECK(ExitKernel(3, 0.5, r).total_mass().value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ExitKernel(3, 0.5, 0.5).constant() == doctest::Approx(ExitKernel(3, 0.5, 2.0).constant()).epsilon(1e-10));
}

TEST_CASE("the exponent-one kernel is not normalizable") {
  for (int d : {2, 3})
    for (double a : {0.25, 0.5, 0.75}) CHECK(ExitKernel(d, a, 1.0, ExitVariant::AsPrinted).total_mass().infinite);
}

TEST_CASE("test bumps") {
  auto xi = TestBump::make(Point{0.1, 0.0, 0.0}, 0.3, 1.0, Point{0.5, 0.2, 0.0});
  CHECK(xi.nonnegative());
  CHECK(xi(Point{0.5, 0.0, 0.0}) == 0.0);
  CHECK(xi(Point{0.1, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(TestBump::make(Point::zero(3), 0.3, 1.0, Point{10.0, 0.0, 0.0}), PreconditionError);

  // Laplacian against a central difference.
  Point x{0.15, 0.05, -0.02};
  const double h = 1e-4;
  double fd = 0.0;
  for (int i = 0; i < 3; ++i) {
    Point e = Point::axis(3, i, h);
    fd += (xi(x + e) - 2.0 * xi(x) + xi(x - e)) / (h * h);
  }
  CHECK(xi.laplacian(x) == doctest::Approx(fd).epsilon(1e-5));

  // Integral against star quadrature around the centre.
  auto q = quad::integrate_star(xi.center, Region{}, xi.radius, [&](const Point& y) { return xi(y); });
  CHECK(xi.integral() == doctest::Approx(q.value).epsilon(1e-10));
}

TEST_CASE("fractional Laplacian of a bump") {
  CHECK(frac_laplacian_constant(3, 0.5) == doctest::Approx(1.0 / (pi * pi)));
  auto xi = TestBump::make(Point::zero(3), 0.3);
  Point x{0.1, 0.05, 0.0};
  CHECK(apply_minus_frac_laplacian(xi, x, 1.0).value == doctest::Approx(-xi.laplacian(x)));
  // Far field: -c_{d,α} ∫ξ / |x|^{d+2α}, relative correction O((ρ/|x|)^2).
  for (double a : {0.3, 0.7}) {
    Point far{5.0, 0.0, 0.0};
    double lead = -frac_laplacian_constant(3, a) * xi.integral() / std::pow(5.0, 3.0 + 2.0 * a);
    CHECK(apply_minus_frac_laplacian(xi, far, a).value == doctest::Approx(lead).epsilon(0.02));
  }
}
