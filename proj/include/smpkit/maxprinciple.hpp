#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smpkit/geometry.hpp"
#include "smpkit/kernels.hpp"
#include "smpkit/model.hpp"
#include "smpkit/potentials.hpp"

namespace smpkit::mp {

using Fn = std::function<double(const Point&)>;

enum class Verdict { InE, InN, Undecided };
const char* to_string(Verdict v);

struct ClassifyOptions {
  /// Geometric δ schedule r·ratio^k, k = 1..count.
  int delta_count = 14;
  double delta_ratio = 0.5;
  int angular_level = 16;
  /// Cauchy test: last increment ratios at most this, extrapolated tail at most cauchy_rel·J.
  double cauchy_ratio = 0.9;
  double cauchy_rel = 1e-3;
  int cauchy_window = 3;
  /// Divergence coefficients count when they exceed this many standard errors.
  double significance = 5.0;
};

struct ClassificationReport {
  Point x;
  Verdict verdict = Verdict::Undecided;
  potentials::LocalGreenIntegral table;
  std::vector<double> radii;
  double tail_estimate = 0.0;  // extrapolated remainder of J beyond the last δ (Cauchy branch)
  std::string method = "ball-neighborhood test";
  std::string reason;
};

/// Decides x ∈ E_ν or x ∈ N_ν from J_δ(x, r) as δ → 0. The neighbourhood
/// radius is the largest schedule radius with B(x, r) ⊂ D (at most 0.9 of
/// the distance to ∂D). Undecided is returned instead of guessing.
ClassificationReport classify_point(const Point& x, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                    const model::RadiiSchedule& radii, const ClassifyOptions& opts = {});
/// Same with an explicit δ schedule.
ClassificationReport classify_point(const Point& x, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                    const model::RadiiSchedule& radii, const std::vector<double>& deltas,
                                    const ClassifyOptions& opts = {});

/// a_d = π^{d/2}/Γ(d/2+1) and b_d = 2π^{d/2}/Γ(d/2), with b_d = d·a_d checked.
double ball_volume_constant(int d);
double sphere_area_constant(int d);

struct AverageOptions {
  int radial_points = 16;
  int angular_level = 12;
};

/// ⨍_{B(x,r)} u. achieved_tol compares the rule against its half-resolution sibling.
kernels::Approx volume_average(const Fn& u, const Point& x, double r, const AverageOptions& opts = {});

/// ∫ K_r(x, y) u(y) dy over |y - x| > r with the stable exit kernel. With a
/// domain, u is taken to vanish outside it.
kernels::Approx fractional_average(const Fn& u, const Point& x, double r, double alpha,
                                   kernels::ExitVariant variant = kernels::ExitVariant::Normalized,
                                   const DomainSpec* domain = nullptr, const AverageOptions& opts = {});

struct FineLimitOptions {
  int max_order = 3;
  /// Averages over the last `tail` radii form the limsup proxy.
  int tail = 3;
  /// Accept the extrapolation when residual <= abs_tol + rel_tol·|limit|.
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  AverageOptions average{};
};

struct FineLimitResult {
  Point x;
  model::OperatorKind op = model::OperatorKind::BrownianLaplacian;
  double alpha = 1.0;
  std::vector<double> radii;
  std::vector<double> averages;
  std::vector<double> average_tol;
  double limit = 0.0;
  int order = 0;
  double residual = 0.0;  // last two Neville orders plus quadrature error
  double tail_max = 0.0;
  double exponent = 2.0;  // extrapolation variable h = r^exponent
  bool undecided = false;
};

/// ǔ(x) by extrapolating averages over shrinking radii to r = 0.
FineLimitResult fine_limit(const Fn& u, const Point& x, const model::OperatorSpec& op,
                           const model::RadiiSchedule& radii, const FineLimitOptions& opts = {});

/// Smooth test functions supported in D: centres on a grid, optionally tilted.
std::vector<kernels::TestBump> bump_family(const DomainSpec& domain, int per_axis, double radius, bool tilted);

struct WeakTestOptions {
  double tol = 1e-6;
  int angular_level = 16;
  /// Outer and inner levels for the fractional case, where -Aξ has no compact support.
  int frac_outer_level = 6;
  int frac_inner_level = 6;
  /// Known singular points of u (integrable), passed to the quadrature.
  std::vector<Point> u_singular;
};

struct BumpValue {
  kernels::TestBump bump;
  double generator_part = 0.0;  // ⟨u, -Aξ⟩
  double potential_part = 0.0;  // ⟨u·ν, ξ⟩
  double value = 0.0;           // sum, integrated as one integrand
};

struct WeakTestSummary {
  std::vector<BumpValue> values;
  double min_value = 0.0;
  std::size_t argmin = 0;
  double tol = 0.0;
  bool pass = false;
};

WeakTestSummary weak_supersolution_test(const Fn& u, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                        const std::vector<kernels::TestBump>& bumps, const WeakTestOptions& opts = {});

/// Closed-form candidate for the dichotomy check.
struct Candidate {
  std::string name;
  Fn u;
  std::vector<Point> singular;
};

enum class DichotomyVerdict { Consistent, Trivial, Violation, Undecided };
const char* to_string(DichotomyVerdict v);

struct DichotomyOptions {
  /// ǔ counts as zero below zero_threshold·(grid max of u).
  double zero_threshold = 1e-6;
  model::RadiiSchedule radii{1e-2, 1e-4, 8, model::Spacing::Geometric};
  model::RadiiSchedule classify_radii{0.5, 0.05, 4, model::Spacing::Geometric};
  FineLimitOptions fine{};
  ClassifyOptions classify{};
  WeakTestOptions weak{};
  int bumps_per_axis = 3;
  double bump_radius = 0.3;
};

struct GridValue {
  Point x;
  double u = 0.0;
  FineLimitResult fine;
  bool in_zero_set = false;
};

struct DichotomyReport {
  std::string candidate;
  std::vector<GridValue> grid;
  double truncation = 0.0;  // k in u ∧ k
  double threshold = 0.0;   // absolute zero threshold
  std::vector<std::size_t> zero_set;
  std::vector<ClassificationReport> classifications;  // one per zero-set point
  WeakTestSummary weak;
  DichotomyVerdict verdict = DichotomyVerdict::Undecided;
  std::string reason;
};

/// Points of a regular grid over the bounding box lying in D at distance >= margin from ∂D.
std::vector<Point> grid_points(const DomainSpec& domain, int per_axis, double margin);

/// Runs the weak test (throws PreconditionError when it fails), computes ǔ of
/// u ∧ k on the grid, collects the zero set and classifies its points.
DichotomyReport dichotomy_check(const Candidate& u, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                const std::vector<Point>& grid, const DichotomyOptions& opts = {});

}  // namespace smpkit::mp
