#include <doctest.h>

#include <cmath>
#include <random>

#include "smpkit/kernels.hpp"
#include "smpkit/potentials.hpp"

using namespace smpkit;
using namespace smpkit::potentials;

namespace {
const auto kBall = DomainSpec::unit_ball(3);
const auto kLap = model::OperatorSpec::laplacian(kBall);
const Point kO = Point::zero(3);
}  // namespace

TEST_CASE("potentials of radial densities match the radial ODE") {
  // Δu = -V, u = 0 on the unit sphere.
  auto p1 = potential(model::MeasureSpec::power(1.0, kO), kLap, kO);
  CHECK(p1.value.value == doctest::Approx(0.5).epsilon(1e-8));
  Point x{0.3, 0.1, 0.0};
  CHECK(potential(model::MeasureSpec::power(1.0, kO), kLap, x).value.value ==
        doctest::Approx((1.0 - norm(x)) / 2.0).epsilon(1e-6));
  CHECK(potential(model::MeasureSpec::constant(1.0), kLap, x).value.value ==
        doctest::Approx((1.0 - norm2(x)) / 6.0).epsilon(1e-8));
  CHECK(potential(model::MeasureSpec::power(2.0, kO, 6.0), kLap, kO).value.infinite);
}

TEST_CASE("potential of a surface measure") {
  // Constant 1/4 inside S(0, 1/2), (1/|x| - 1)/4 between the sphere and ∂D.
  auto sigma = model::MeasureSpec::sphere(kO, 0.5);
  CHECK(potential(sigma, kLap, kO).value.value == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(potential(sigma, kLap, Point{0.2, 0.1, 0.0}).value.value == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(potential(sigma, kLap, Point{0.8, 0.0, 0.0}).value.value == doctest::Approx(0.0625).epsilon(1e-6));
}

TEST_CASE("potential is linear in the measure") {
  auto a = model::MeasureSpec::power(1.0, Point{0.2, 0.0, 0.0});
  auto b = model::MeasureSpec::constant(2.0);
  Point x{-0.1, 0.3, 0.2};
  double pa = potential(a, kLap, x).value.value, pb = potential(b, kLap, x).value.value;
  CHECK(potential(a + b.scaled(0.5), kLap, x).value.value == doctest::Approx(pa + 0.5 * pb).epsilon(1e-7));
}

TEST_CASE("stable potential of a constant is the stable residence time") {
  for (double a : {0.3, 0.6}) {
    auto op = model::OperatorSpec::fractional(a, kBall);
    Point x{0.2, -0.1, 0.1};
    CHECK(potential(model::MeasureSpec::constant(1.0), op, x).value.value ==
          doctest::Approx(kernels::expected_residence_stable(3, a, 1.0, x)).epsilon(1e-5));
  }
}

TEST_CASE("local Green integrals of a constant density converge to 1/12") {
  std::vector<double> deltas;
  for (int k = 1; k <= 8; ++k) deltas.push_back(0.5 * std::pow(0.25, k));
  auto L = local_green_integral(kO, 0.5, deltas, model::MeasureSpec::constant(1.0), kLap);
  REQUIRE(L.J.size() == deltas.size());
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    double d = deltas[j];
    double exact = (0.125 - 0.5 / 12.0) - (d * d / 2.0 - d * d * d / 3.0);
    CHECK(L.J[j] == doctest::Approx(exact).epsilon(1e-9));
    if (j > 0) CHECK(L.J[j] >= L.J[j - 1]);
  }
}

TEST_CASE("local fit recovers a logarithmic divergence") {
  std::vector<double> deltas, J;
  for (int k = 1; k <= 10; ++k) {
    deltas.push_back(std::pow(0.5, k));
    J.push_back(1.0 + 2.0 * std::log(1.0 / deltas.back()));
  }
  auto f = fit_local(deltas, J, 1e-12);
  REQUIRE(f.ok);
  CHECK(f.log_coef.value == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(f.constant.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Neumann series resolvent of a constant potential") {
  // (Δ - λ) u = -1, u = 0 on ∂B: u(x) = (1 - sinh(√λ r) / (r sinh √λ)) / λ.
  for (double lambda : {0.5, 1.0}) {
    NeumannResolvent nr(kLap, model::MeasureSpec::constant(lambda));
    auto one = [](const Point&) { return 1.0; };
    double s = std::sqrt(lambda);
    auto c = nr.apply(one, kO);
    CHECK(c.value == doctest::Approx((1.0 - s / std::sinh(s)) / lambda).epsilon(1e-5));
    CHECK(c.lower <= c.value);
    CHECK(c.value <= c.upper);
    Point x{0.5, 0.2, -0.3};
    double r = norm(x);
    CHECK(nr.apply(one, x).value == doctest::Approx((1.0 - std::sinh(s * r) / (r * std::sinh(s))) / lambda).epsilon(1e-3));
    CHECK(nr.identity_residual(one, Point{0.2, 0.3, 0.1}) < 1e-6);
    CHECK(nr.potential(one, kO) == doctest::Approx(1.0 / 6.0).epsilon(1e-8));
  }
}
