#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "smpkit/geometry.hpp"
#include "smpkit/kernels.hpp"

namespace smpkit::capacity {

/// Regular grid of cubic cells with side h; cell centres lo + (i + 1/2) h.
struct Grid {
  Point lo;
  double h = 0.1;
  std::vector<int> shape;

  /// Grid of n^d cells covering the box [-half, half]^d.
  static Grid cube(int d, int n, double half);

  int dim() const { return lo.dim(); }
  std::size_t size() const;
  Point center(std::size_t idx) const;
  std::vector<int> multi_index(std::size_t idx) const;
  double cell_volume() const;
  /// Cells whose centre lies in the ball.
  std::vector<std::size_t> cells_in_ball(const Point& c, double r) const;
  /// Cell containing p (throws when p is outside the grid).
  std::size_t cell_of(const Point& p) const;
};

/// E|X - Y|^{-p} for X, Y independent and uniform in the d-ball of radius a.
double ball_self_average(int d, double p, double a);

struct CapacityProblem {
  Grid grid;
  std::vector<std::size_t> target;
  /// Cells where the density or measure may live (empty: all cells for C_p,
  /// the target for C_1).
  std::vector<std::size_t> support;
  kernels::GreenKernel kernel = kernels::GreenKernel::riesz(3, 1.0);
  double scale = 1.0;  // kernel multiplier
  double p = 1.0;

  /// Unit Riesz kernel |x - y|^{2α-d}.
  static CapacityProblem riesz(Grid grid, std::vector<std::size_t> target, double alpha = 1.0, double p = 1.0);

  /// scale·G(x_i, x_j); on the diagonal the double average over the
  /// equal-volume ball of the cell.
  double entry(std::size_t i, std::size_t j) const;
  double self_interaction() const;
};

struct CapacitySolution {
  double value = 0.0;
  std::vector<std::size_t> cells;
  std::vector<double> optimizer;  // weights on `cells` (density values for C_p, masses for C_1)
  double feasibility_residual = 0.0;
  int iterations = 0;
  double dual_value = 0.0;
  double duality_gap = 0.0;  // relative
  bool converged = false;
  std::string method;
};

struct CpOptions {
  int max_iter = 5000;
  double gap_tol = 1e-6;
};

/// C_p = inf Σ w f^p over f >= 0 with (K f) >= 1 on the target, p > 1, by
/// projected gradient ascent on the smooth concave dual with a final
/// rescaling to a feasible f.
CapacitySolution solve_cp(const CapacityProblem& problem, const CpOptions& opts = {});

struct C1Options {
  double gap_tol = 1e-6;
  int max_rounds = 40;
  /// Violated rows/columns added per generation round (largest first).
  std::size_t batch = 1500;
};

/// C_1 = inf ‖μ‖ over μ >= 0 with Rμ >= 1 on the target (linear program).
CapacitySolution solve_c1(const CapacityProblem& problem, const C1Options& opts = {});

/// c_1 = sup ‖μ‖ over μ >= 0 carried by the target with Rμ <= 1 on the whole grid.
CapacitySolution solve_dual_c1(const CapacityProblem& problem, const C1Options& opts = {});

}  // namespace smpkit::capacity
