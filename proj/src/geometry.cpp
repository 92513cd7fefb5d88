#include "smpkit/geometry.hpp"

#include <algorithm>
#include <limits>

#include "smpkit/errors.hpp"

namespace smpkit {

Point::Point(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
  if (dim_ > kMaxDim) throw DomainError("point dimension exceeds kMaxDim");
  std::copy(xs.begin(), xs.end(), c_.begin());
}

Point::Point(std::span<const double> xs) : dim_(static_cast<int>(xs.size())) {
  if (dim_ > kMaxDim) throw DomainError("point dimension exceeds kMaxDim");
  std::copy(xs.begin(), xs.end(), c_.begin());
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Point radial_projection(const Point& x, const Point& c, double r) {
  Point v = x - c;
  double n = norm(v);
  if (n == 0.0) return c + Point::axis(x.dim(), 0, r);
  return c + v * (r / n);
}

void box_crossings(const Point& o, const Point& u, const Box& b, std::vector<double>& out) {
  for (int i = 0; i < o.dim(); ++i) {
    if (u[i] == 0.0) continue;
    for (double face : {b.lo[i], b.hi[i]}) {
      double s = (face - o[i]) / u[i];
      if (s > 0.0) out.push_back(s);
    }
  }
}

}  // namespace

void ray_sphere_crossings(const Point& origin, const Point& dir, const Point& c, double r,
                          std::vector<double>& out) {
  Point oc = origin - c;
  double b = dot(dir, oc);
  double cc = norm2(oc) - r * r;
  double a = norm2(dir);
  double disc = b * b - a * cc;
  if (disc <= 0.0) return;
  double sq = std::sqrt(disc);
  // Stable quadratic roots.
  double q = -(b + std::copysign(sq, b));
  double s1 = q / a;
  double s2 = (q != 0.0) ? cc / q : -b / a;
  if (s1 > 0.0) out.push_back(s1);
  if (s2 > 0.0) out.push_back(s2);
}

int DomainSpec::dim() const {
  return std::visit(Overloaded{[](const Ball& b) { return b.center.dim(); },
                               [](const Box& b) { return b.lo.dim(); },
                               [](const UnionOfBalls& u) {
                                 return u.balls.empty() ? 0 : u.balls.front().center.dim();
                               },
                               [](const Annulus& a) { return a.center.dim(); }},
                    shape);
}

bool DomainSpec::contains(const Point& x) const {
  return std::visit(
      Overloaded{[&](const Ball& b) { return norm2(x - b.center) < b.radius * b.radius; },
                 [&](const Box& b) {
                   for (int i = 0; i < x.dim(); ++i)
                     if (!(x[i] > b.lo[i] && x[i] < b.hi[i])) return false;
                   return true;
                 },
                 [&](const UnionOfBalls& u) {
                   return std::any_of(u.balls.begin(), u.balls.end(), [&](const Ball& b) {
                     return norm2(x - b.center) < b.radius * b.radius;
                   });
                 },
                 [&](const Annulus& a) {
                   double r2 = norm2(x - a.center);
                   return r2 > a.r_in * a.r_in && r2 < a.r_out * a.r_out;
                 }},
      shape);
}

double DomainSpec::boundary_distance(const Point& x) const {
  double d = std::visit(
      Overloaded{[&](const Ball& b) { return b.radius - distance(x, b.center); },
                 [&](const Box& b) {
                   double m = std::numeric_limits<double>::infinity();
                   for (int i = 0; i < x.dim(); ++i)
                     m = std::min({m, x[i] - b.lo[i], b.hi[i] - x[i]});
                   return m;
                 },
                 [&](const UnionOfBalls& u) {
                   double m = 0.0;
                   for (const auto& b : u.balls) m = std::max(m, b.radius - distance(x, b.center));
                   return m;
                 },
                 [&](const Annulus& a) {
                   double rho = distance(x, a.center);
                   return std::min(a.r_out - rho, rho - a.r_in);
                 }},
      shape);
  return std::max(d, 0.0);
}

Point DomainSpec::project_to_boundary(const Point& x) const {
  return std::visit(
      Overloaded{[&](const Ball& b) { return radial_projection(x, b.center, b.radius); },
                 [&](const Box& b) {
                   Point p = x;
                   int best = 0;
                   double m = std::numeric_limits<double>::infinity();
                   bool hi_face = false;
                   for (int i = 0; i < x.dim(); ++i) {
                     if (std::abs(x[i] - b.lo[i]) < m) {
                       m = std::abs(x[i] - b.lo[i]);
                       best = i;
                       hi_face = false;
                     }
                     if (std::abs(b.hi[i] - x[i]) < m) {
                       m = std::abs(b.hi[i] - x[i]);
                       best = i;
                       hi_face = true;
                     }
                   }
                   p[best] = hi_face ? b.hi[best] : b.lo[best];
                   return p;
                 },
                 [&](const UnionOfBalls& u) {
                   const Ball* best = nullptr;
                   double m = -std::numeric_limits<double>::infinity();
                   for (const auto& b : u.balls) {
                     double dd = b.radius - distance(x, b.center);
                     if (dd > m) {
                       m = dd;
                       best = &b;
                     }
                   }
                   return radial_projection(x, best->center, best->radius);
                 },
                 [&](const Annulus& a) {
                   double rho = distance(x, a.center);
                   double r = (a.r_out - rho < rho - a.r_in) ? a.r_out : a.r_in;
                   return radial_projection(x, a.center, r);
                 }},
      shape);
}

int DomainSpec::component_of(const Point& x) const {
  if (const auto* u = std::get_if<UnionOfBalls>(&shape)) {
    for (std::size_t i = 0; i < u->balls.size(); ++i)
      if (norm2(x - u->balls[i].center) < u->balls[i].radius * u->balls[i].radius)
        return static_cast<int>(i);
    return -1;
  }
  return contains(x) ? 0 : -1;
}

Box DomainSpec::bounding_box() const {
  auto ball_box = [](const Point& c, double r) {
    Box b{c, c};
    for (int i = 0; i < c.dim(); ++i) {
      b.lo[i] -= r;
      b.hi[i] += r;
    }
    return b;
  };
  return std::visit(Overloaded{[&](const Ball& b) { return ball_box(b.center, b.radius); },
                               [&](const Box& b) { return b; },
                               [&](const UnionOfBalls& u) {
                                 Box out = ball_box(u.balls.front().center, u.balls.front().radius);
                                 for (const auto& b : u.balls) {
                                   Box bb = ball_box(b.center, b.radius);
                                   for (int i = 0; i < out.lo.dim(); ++i) {
                                     out.lo[i] = std::min(out.lo[i], bb.lo[i]);
                                     out.hi[i] = std::max(out.hi[i], bb.hi[i]);
                                   }
                                 }
                                 return out;
                               },
                               [&](const Annulus& a) { return ball_box(a.center, a.r_out); }},
                    shape);
}

bool Region::contains(const Point& y) const {
  if (has_domain_ && !domain_.contains(y)) return false;
  for (const auto& b : inside_)
    if (norm2(y - b.center) >= b.radius * b.radius) return false;
  for (const auto& b : outside_)
    if (norm2(y - b.center) <= b.radius * b.radius) return false;
  return true;
}

std::vector<RayInterval> Region::ray_intervals(const Point& origin, const Point& dir,
                                               double s_max) const {
  std::vector<double> dom;
  std::vector<double> aux;
  if (has_domain_) {
    std::visit(Overloaded{[&](const Ball& b) { ray_sphere_crossings(origin, dir, b.center, b.radius, dom); },
                          [&](const Box& b) { box_crossings(origin, dir, b, dom); },
                          [&](const UnionOfBalls& u) {
                            for (const auto& b : u.balls)
                              ray_sphere_crossings(origin, dir, b.center, b.radius, dom);
                          },
                          [&](const Annulus& a) {
                            ray_sphere_crossings(origin, dir, a.center, a.r_in, dom);
                            ray_sphere_crossings(origin, dir, a.center, a.r_out, dom);
                          }},
               domain_.shape);
  }
  for (const auto& b : inside_) ray_sphere_crossings(origin, dir, b.center, b.radius, aux);
  for (const auto& b : outside_) ray_sphere_crossings(origin, dir, b.center, b.radius, aux);

  std::vector<RayEnd> ends;
  ends.push_back({0.0, false});
  for (double s : dom)
    if (s < s_max) ends.push_back({s, true});
  for (double s : aux)
    if (s < s_max) ends.push_back({s, false});
  ends.push_back({s_max, false});
  std::sort(ends.begin(), ends.end(), [](const RayEnd& a, const RayEnd& b) { return a.s < b.s; });

  std::vector<RayInterval> out;
  for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
    const RayEnd& a = ends[i];
    const RayEnd& b = ends[i + 1];
    if (!(b.s > a.s)) continue;
    double mid = 0.5 * (a.s + b.s);
    if (!contains(origin + dir * mid)) continue;
    if (!out.empty() && out.back().hi.s == a.s) {
      out.back().hi = b;
    } else {
      out.push_back({a, b});
    }
  }
  return out;
}

}  // namespace smpkit
