#include <doctest.h>

#include <cmath>
#include <numbers>

#include "smpkit/capacity.hpp"

using namespace smpkit;
using namespace smpkit::capacity;

namespace {
double equal_volume_radius(double h) { return h * std::cbrt(3.0 / (4.0 * std::numbers::pi)); }
}  // namespace

TEST_CASE("grid geometry") {
  auto g = Grid::cube(3, 5, 1.0);
  CHECK(g.size() == 125);
  CHECK(g.h == doctest::Approx(0.4));
  CHECK(g.cell_volume() == doctest::Approx(0.064));
  auto mid = g.cell_of(Point::zero(3));
  CHECK(norm(g.center(mid)) == doctest::Approx(0.0));
  CHECK(g.multi_index(mid) == std::vector<int>{2, 2, 2});
  CHECK(g.cells_in_ball(Point::zero(3), 0.1).size() == 1);
  CHECK_THROWS(g.cell_of(Point{2.0, 0.0, 0.0}));
}

TEST_CASE("self average of the Newtonian kernel over a ball") {
  // E|X - Y|^{-1} over the unit 3-ball is 6/5; the average scales like a^{-p}.
  CHECK(ball_self_average(3, 1.0, 1.0) == doctest::Approx(1.2).epsilon(1e-10));
  CHECK(ball_self_average(3, 1.0, 0.5) == doctest::Approx(2.4).epsilon(1e-10));
}

TEST_CASE("single-cell C1 is the inverse self-interaction and shrinks with h") {
  double prev = INFINITY;
  for (int m : {5, 9, 17}) {
    auto g = Grid::cube(3, m, 1.0);
    auto pr = CapacityProblem::riesz(g, {g.cell_of(Point::zero(3))});
    auto s = solve_c1(pr);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(equal_volume_radius(g.h) / 1.2).epsilon(1e-6));
    CHECK(s.value < prev);
    prev = s.value;
  }
}

TEST_CASE("C1 and c1 agree on a ball and increase with the target") {
  auto g = Grid::cube(3, 11, 1.0);
  double prev = 0.0;
  for (double r : {0.3, 0.5}) {
    auto pr = CapacityProblem::riesz(g, g.cells_in_ball(Point::zero(3), r));
    auto big = solve_c1(pr);
    auto small = solve_dual_c1(pr);
    REQUIRE(big.converged);
    REQUIRE(small.converged);
    CHECK(small.value <= big.value * (1.0 + 1e-6));
    CHECK(small.value == doctest::Approx(big.value).epsilon(1e-5));
    CHECK(big.value > prev);
    prev = big.value;
  }
}

TEST_CASE("C_p for p > 1 is feasible, converged and monotone in the target") {
  auto g = Grid::cube(3, 11, 1.0);
  double prev = 0.0;
  for (double r : {0.3, 0.5}) {
    auto s = solve_cp(CapacityProblem::riesz(g, g.cells_in_ball(Point::zero(3), r), 1.0, 1.25));
    CHECK(s.converged);
    CHECK(s.feasibility_residual <= 1e-12);
    CHECK(s.duality_gap < 1e-6);
    CHECK(s.value > prev);
    prev = s.value;
  }
  double single = INFINITY;
  for (int m : {5, 9, 17}) {
    auto gg = Grid::cube(3, m, 1.0);
    auto s = solve_cp(CapacityProblem::riesz(gg, {gg.cell_of(Point::zero(3))}, 1.0, 1.25));
    CHECK(s.value < single);
    single = s.value;
  }
}
