#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smpkit/geometry.hpp"

namespace smpkit::model {

/// Real number or +infinity, kept apart so "diverges" never reads as "large".
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal infinity() { return {std::numeric_limits<double>::infinity(), true}; }
  static ExtendedReal finite(double v) { return {v, false}; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.infinite || b.infinite) return infinity();
    return finite(a.value + b.value);
  }
};

enum class OperatorKind { BrownianLaplacian, FractionalLaplacian };

/// Dirichlet generator on D: the Laplacian (alpha = 1) or the fractional
/// Laplacian of order alpha in (0, 1).
struct OperatorSpec {
  OperatorKind kind = OperatorKind::BrownianLaplacian;
  double alpha = 1.0;
  int dim = 3;
  DomainSpec domain = DomainSpec::unit_ball(3);

  static OperatorSpec laplacian(DomainSpec domain) {
    int d = domain.dim();
    return {OperatorKind::BrownianLaplacian, 1.0, d, std::move(domain)};
  }
  static OperatorSpec fractional(double alpha, DomainSpec domain) {
    int d = domain.dim();
    return {OperatorKind::FractionalLaplacian, alpha, d, std::move(domain)};
  }
  bool brownian() const { return kind == OperatorKind::BrownianLaplacian; }
};

/// V(y) = |y - pole|^{-a}
struct DensityPower {
  double a = 0.0;
  Point pole;
};

/// V(y) = dist(y, boundary of D)^{-a}
struct BoundaryPower {
  double a = 0.0;
};

/// Multilinear interpolation of samples on a regular grid over `box`;
/// zero outside the box.
struct TabulatedDensity {
  Box box;
  std::vector<int> shape;
  std::vector<double> values;  // row-major, last axis fastest

  double operator()(const Point& y) const;
};

struct ConstantDensity {
  double lambda = 1.0;
};

/// Surface measure of the sphere S(center, radius).
struct SphereSurface {
  Point center;
  double radius = 0.5;
};

using TermShape = std::variant<DensityPower, BoundaryPower, TabulatedDensity, ConstantDensity, SphereSurface>;

struct MeasureTerm {
  TermShape shape;
  double weight = 1.0;
};

/// Positive measure nu = sum of weighted terms, restricted to D.
struct MeasureSpec {
  std::vector<MeasureTerm> terms;

  static MeasureSpec zero() { return {}; }
  static MeasureSpec constant(double lambda) { return {{{ConstantDensity{lambda}, 1.0}}}; }
  static MeasureSpec power(double a, Point pole, double weight = 1.0) {
    return {{{DensityPower{a, std::move(pole)}, weight}}};
  }
  static MeasureSpec sphere(Point center, double radius, double weight = 1.0) {
    return {{{SphereSurface{std::move(center), radius}, weight}}};
  }

  MeasureSpec operator+(const MeasureSpec& o) const;
  MeasureSpec scaled(double c) const;

  bool empty() const;
  bool has_density() const;
  bool has_surface() const;
  /// Total density of the absolutely continuous terms at y in D.
  double density(const Point& y, const DomainSpec& domain) const;
  /// Points where some density term is unbounded.
  std::vector<Point> poles() const;
  bool has_boundary_power() const;
  std::vector<std::pair<SphereSurface, double>> surfaces() const;
};

enum class Spacing { Geometric, Linear };

/// Decreasing schedule r_max = r_0 > r_1 > ... > r_{count-1} = r_min > 0.
struct RadiiSchedule {
  double r_max = 0.1;
  double r_min = 1e-3;
  int count = 8;
  Spacing spacing = Spacing::Geometric;

  std::vector<double> values() const;
};

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate(const DomainSpec& domain);
std::vector<Violation> validate(const OperatorSpec& op);
std::vector<Violation> validate(const MeasureSpec& nu, const DomainSpec& domain);
std::vector<Violation> validate(const RadiiSchedule& s);

struct MassResult {
  ExtendedReal mass;
  double achieved_tol = 0.0;
  bool closed_form = true;
};

/// nu(B(center, r) ∩ D). Closed forms when the ball lies in D, quadrature otherwise;
/// achieved_tol is the last refinement difference and may exceed tol.
MassResult measure_of_ball(const MeasureSpec& nu, const DomainSpec& domain, const Point& center,
                           double r, double tol = 1e-8);

}  // namespace smpkit::model
