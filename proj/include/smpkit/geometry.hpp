#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <variant>
#include <vector>

namespace smpkit {

inline constexpr int kMaxDim = 8;

/// Fixed-capacity point of R^d, d <= kMaxDim. Value type, no heap traffic in path loops.
class Point {
 public:
  Point() = default;
  explicit Point(int dim) : dim_(dim) {}
  Point(std::initializer_list<double> xs);
  explicit Point(std::span<const double> xs);

  static Point zero(int dim) { return Point(dim); }
  static Point axis(int dim, int i, double value = 1.0) {
    Point p(dim);
    p[i] = value;
    return p;
  }

  int dim() const noexcept { return dim_; }
  double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

  Point& operator+=(const Point& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }
  friend bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double dot(const Point& a, const Point& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(const Point& a) noexcept { return dot(a, a); }
inline double norm(const Point& a) noexcept { return std::sqrt(norm2(a)); }
inline double distance(const Point& a, const Point& b) noexcept { return norm(a - b); }

struct Ball {
  Point center;
  double radius = 1.0;
};

struct Box {
  Point lo;
  Point hi;
};

struct UnionOfBalls {
  std::vector<Ball> balls;
};

struct Annulus {
  Point center;
  double r_in = 0.5;
  double r_out = 1.0;
};

/// Bounded open set D of R^d.
struct DomainSpec {
  std::variant<Ball, Box, UnionOfBalls, Annulus> shape;

  static DomainSpec ball(Point center, double radius) { return {Ball{std::move(center), radius}}; }
  static DomainSpec unit_ball(int dim) { return ball(Point::zero(dim), 1.0); }

  int dim() const;
  bool contains(const Point& x) const;
  /// Radius of a ball centred at x and contained in D (exact except for
  /// overlapping unions, where it is a lower bound). Zero outside D.
  double boundary_distance(const Point& x) const;
  /// Nearest point of the boundary piece that determines boundary_distance.
  Point project_to_boundary(const Point& x) const;
  /// Index of the union component holding x; 0 for connected shapes, -1 outside.
  int component_of(const Point& x) const;
  /// Axis-aligned box enclosing D.
  Box bounding_box() const;
  const Ball* as_ball() const { return std::get_if<Ball>(&shape); }
};

/// Ray parameters s in (0, s_max) where origin + s*dir crosses some boundary piece.
/// Pieces are tagged so integrators can grade toward genuine domain boundaries.
struct RayEnd {
  double s;
  bool domain_boundary;
};

struct RayInterval {
  RayEnd lo;
  RayEnd hi;
};

/// Intersection of a domain (optional) with balls and ball complements.
/// Used to describe integration regions such as D ∩ {δ < |y - x| < r}.
class Region {
 public:
  Region() = default;
  explicit Region(DomainSpec domain) : domain_(std::move(domain)), has_domain_(true) {}

  Region& inside_ball(const Point& c, double r) {
    inside_.push_back({c, r});
    return *this;
  }
  Region& outside_ball(const Point& c, double r) {
    outside_.push_back({c, r});
    return *this;
  }

  bool contains(const Point& y) const;
  /// Maximal sub-intervals of (0, s_max) along the ray that lie in the region.
  std::vector<RayInterval> ray_intervals(const Point& origin, const Point& dir, double s_max) const;

  const DomainSpec* domain() const { return has_domain_ ? &domain_ : nullptr; }

 private:
  DomainSpec domain_{};
  bool has_domain_ = false;
  std::vector<Ball> inside_;
  std::vector<Ball> outside_;
};

/// Parameters s > 0 where the ray origin + s*dir meets the sphere |y - c| = r.
void ray_sphere_crossings(const Point& origin, const Point& dir, const Point& c, double r,
                          std::vector<double>& out);

}  // namespace smpkit
