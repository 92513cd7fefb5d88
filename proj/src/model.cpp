#include "smpkit/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "smpkit/errors.hpp"
#include "smpkit/quadrature.hpp"

namespace smpkit::model {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool ball_inside_domain(const DomainSpec& domain, const Point& c, double r) {
  if (!domain.contains(c)) return false;
  if (const auto* u = std::get_if<UnionOfBalls>(&domain.shape)) {
    for (const auto& b : u->balls)
      if (distance(c, b.center) + r <= b.radius) return true;
    return false;
  }
  return domain.boundary_distance(c) >= r;
}

bool sphere_strictly_inside(const DomainSpec& domain, const Point& c, double rho) {
  if (const auto* a = std::get_if<Annulus>(&domain.shape)) {
    double dc = distance(c, a->center);
    if (dc + rho >= a->r_out) return false;
    return (rho - dc > a->r_in) || (dc - rho > a->r_in);
  }
  return ball_inside_domain(domain, c, rho) && domain.boundary_distance(c) > rho;
}

// Mass of |y - p|^{-a} dy over B(c, r).
ExtendedReal power_mass(int d, double a, const Point& pole, const Point& c, double r) {
  const double area = quad::unit_sphere_area(d);
  double dist = distance(pole, c);
  if (a >= d && dist <= r) return ExtendedReal::infinity();
  auto shell = [&](double s) { return area * std::pow(s, d - 1 - a) * quad::sphere_fraction_in_ball(d, s, dist, r); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  if (dist < r) {
    // Full spheres around the pole up to r - dist.
    total += area * std::pow(r - dist, d - a) / (d - a);
    if (dist > 0.0) total += GK::integrate(shell, r - dist, r + dist, 12, 1e-13);
  } else {
    total += GK::integrate(shell, dist - r, dist + r, 12, 1e-13);
  }
  return ExtendedReal::finite(total);
}

}  // namespace

double TabulatedDensity::operator()(const Point& y) const {
  const int d = y.dim();
  std::size_t offset = 0;
  std::size_t stride = 1;
  // Collect per-axis cell index and fractional position.
  std::array<int, kMaxDim> idx{};
  std::array<double, kMaxDim> frac{};
  std::array<std::size_t, kMaxDim> strides{};
  for (int i = d - 1; i >= 0; --i) {
    strides[i] = stride;
    stride *= static_cast<std::size_t>(shape[i]);
  }
  for (int i = 0; i < d; ++i) {
    if (y[i] < box.lo[i] || y[i] > box.hi[i]) return 0.0;
    double h = (box.hi[i] - box.lo[i]) / (shape[i] - 1);
    double t = (y[i] - box.lo[i]) / h;
    int k = std::min(static_cast<int>(t), shape[i] - 2);
    idx[i] = k;
    frac[i] = t - k;
    offset += static_cast<std::size_t>(k) * strides[i];
  }
  double v = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::size_t off = offset;
    for (int i = 0; i < d; ++i) {
      bool up = (corner >> i) & 1;
      w *= up ? frac[i] : 1.0 - frac[i];
      if (up) off += strides[i];
    }
    if (w != 0.0) v += w * values[off];
  }
  return v;
}

MeasureSpec MeasureSpec::operator+(const MeasureSpec& o) const {
  MeasureSpec out = *this;
  out.terms.insert(out.terms.end(), o.terms.begin(), o.terms.end());
  return out;
}

MeasureSpec MeasureSpec::scaled(double c) const {
  MeasureSpec out = *this;
  for (auto& t : out.terms) t.weight *= c;
  return out;
}

bool MeasureSpec::empty() const {
  for (const auto& t : terms)
    if (t.weight != 0.0) return false;
  return true;
}

bool MeasureSpec::has_density() const {
  for (const auto& t : terms)
    if (t.weight != 0.0 && !std::holds_alternative<SphereSurface>(t.shape)) return true;
  return false;
}

bool MeasureSpec::has_surface() const {
  for (const auto& t : terms)
    if (t.weight != 0.0 && std::holds_alternative<SphereSurface>(t.shape)) return true;
  return false;
}

bool MeasureSpec::has_boundary_power() const {
  for (const auto& t : terms)
    if (t.weight != 0.0 && std::holds_alternative<BoundaryPower>(t.shape)) return true;
  return false;
}

double MeasureSpec::density(const Point& y, const DomainSpec& domain) const {
  double v = 0.0;
  for (const auto& t : terms) {
    if (t.weight == 0.0) continue;
    v += t.weight * std::visit(Overloaded{[&](const DensityPower& p) {
                                            if (p.a == 0.0) return 1.0;
                                            double r = distance(y, p.pole);
                                            return r > 0.0 ? std::pow(r, -p.a)
                                                           : std::numeric_limits<double>::infinity();
                                          },
                                          [&](const BoundaryPower& b) {
                                            if (b.a == 0.0) return 1.0;
                                            double r = domain.boundary_distance(y);
                                            return r > 0.0 ? std::pow(r, -b.a)
                                                           : std::numeric_limits<double>::infinity();
                                          },
                                          [&](const TabulatedDensity& tab) { return tab(y); },
                                          [&](const ConstantDensity& c) { return c.lambda; },
                                          [&](const SphereSurface&) { return 0.0; }},
                               t.shape);
  }
  return v;
}

std::vector<Point> MeasureSpec::poles() const {
  std::vector<Point> out;
  for (const auto& t : terms)
    if (const auto* p = std::get_if<DensityPower>(&t.shape); p && t.weight != 0.0 && p->a > 0.0)
      if (std::find(out.begin(), out.end(), p->pole) == out.end()) out.push_back(p->pole);
  return out;
}

std::vector<std::pair<SphereSurface, double>> MeasureSpec::surfaces() const {
  std::vector<std::pair<SphereSurface, double>> out;
  for (const auto& t : terms)
    if (const auto* s = std::get_if<SphereSurface>(&t.shape); s && t.weight != 0.0) out.emplace_back(*s, t.weight);
  return out;
}

std::vector<double> RadiiSchedule::values() const {
  std::vector<double> out;
  if (count <= 1) return {r_max};
  for (int k = 0; k < count; ++k) {
    double t = static_cast<double>(k) / (count - 1);
    out.push_back(spacing == Spacing::Geometric ? r_max * std::pow(r_min / r_max, t)
                                                : r_max + (r_min - r_max) * t);
  }
  out.back() = r_min;
  return out;
}

std::vector<Violation> validate(const DomainSpec& domain) {
  std::vector<Violation> v;
  auto check_ball = [&](const Ball& b, const std::string& field) {
    if (!(b.radius > 0.0)) v.push_back({field + ".radius", "radius > 0"});
  };
  std::visit(Overloaded{[&](const Ball& b) { check_ball(b, "domain"); },
                        [&](const Box& b) {
                          if (b.lo.dim() != b.hi.dim()) v.push_back({"domain.hi", "lo and hi have equal dimension"});
                          for (int i = 0; i < std::min(b.lo.dim(), b.hi.dim()); ++i)
                            if (!(b.hi[i] > b.lo[i])) {
                              v.push_back({"domain.hi", "hi > lo in every coordinate"});
                              break;
                            }
                        },
                        [&](const UnionOfBalls& u) {
                          if (u.balls.empty()) v.push_back({"domain.balls", "at least one ball"});
                          for (std::size_t i = 0; i < u.balls.size(); ++i) {
                            check_ball(u.balls[i], "domain.balls[" + std::to_string(i) + "]");
                            if (u.balls[i].center.dim() != u.balls.front().center.dim())
                              v.push_back({"domain.balls", "all centres share one dimension"});
                          }
                        },
                        [&](const Annulus& a) {
                          if (!(a.r_in > 0.0)) v.push_back({"domain.r_in", "r_in > 0"});
                          if (!(a.r_out > a.r_in)) v.push_back({"domain.r_out", "r_out > r_in"});
                        }},
             domain.shape);
  int d = domain.dim();
  if (d < 2 || d > kMaxDim) v.push_back({"domain", "dimension in [2, " + std::to_string(kMaxDim) + "]"});
  return v;
}

std::vector<Violation> validate(const OperatorSpec& op) {
  std::vector<Violation> v;
  if (op.dim < 2) v.push_back({"dim", "d >= 2"});
  if (op.dim > kMaxDim) v.push_back({"dim", "d <= " + std::to_string(kMaxDim)});
  if (!(op.alpha > 0.0 && op.alpha <= 1.0)) v.push_back({"alpha", "alpha in (0, 1]"});
  if (op.kind == OperatorKind::BrownianLaplacian && op.alpha != 1.0)
    v.push_back({"alpha", "alpha = 1 for BrownianLaplacian"});
  if (op.kind == OperatorKind::FractionalLaplacian) {
    if (op.alpha >= 1.0) v.push_back({"alpha", "alpha < 1 for FractionalLaplacian"});
    if (!(2.0 * op.alpha < op.dim)) v.push_back({"alpha", "2α<d required"});
  }
  auto dv = validate(op.domain);
  v.insert(v.end(), dv.begin(), dv.end());
  if (dv.empty() && op.domain.dim() != op.dim) v.push_back({"domain", "domain dimension equals dim"});
  return v;
}

std::vector<Violation> validate(const MeasureSpec& nu, const DomainSpec& domain) {
  std::vector<Violation> v;
  const int d = domain.dim();
  for (std::size_t i = 0; i < nu.terms.size(); ++i) {
    const auto& t = nu.terms[i];
    std::string f = "measure.terms[" + std::to_string(i) + "]";
    if (!(t.weight >= 0.0)) v.push_back({f + ".weight", "weight >= 0"});
    std::visit(Overloaded{[&](const DensityPower& p) {
                            if (!(p.a >= 0.0)) v.push_back({f + ".a", "a >= 0"});
                            if (p.pole.dim() != d) v.push_back({f + ".pole", "pole dimension equals d"});
                          },
                          [&](const BoundaryPower& b) {
                            if (!(b.a >= 0.0)) v.push_back({f + ".a", "a >= 0"});
                          },
                          [&](const TabulatedDensity& tab) {
                            std::size_t n = 1;
                            bool ok = static_cast<int>(tab.shape.size()) == d;
                            for (int s : tab.shape) {
                              if (s < 2) ok = false;
                              n *= static_cast<std::size_t>(std::max(s, 0));
                            }
                            if (!ok) v.push_back({f + ".shape", "d axes with at least 2 samples each"});
                            else if (tab.values.size() != n) v.push_back({f + ".values", "one value per grid node"});
                            for (double x : tab.values)
                              if (!(x >= 0.0)) {
                                v.push_back({f + ".values", "values >= 0"});
                                break;
                              }
                          },
                          [&](const ConstantDensity& c) {
                            if (!(c.lambda >= 0.0)) v.push_back({f + ".lambda", "lambda >= 0"});
                          },
                          [&](const SphereSurface& s) {
                            if (!(s.radius > 0.0)) v.push_back({f + ".radius", "radius > 0"});
                            else if (s.center.dim() != d) v.push_back({f + ".center", "centre dimension equals d"});
                            else if (!sphere_strictly_inside(domain, s.center, s.radius))
                              v.push_back({f, "sphere strictly inside D"});
                          }},
               t.shape);
  }
  return v;
}

std::vector<Violation> validate(const RadiiSchedule& s) {
  std::vector<Violation> v;
  if (!(s.r_min > 0.0)) v.push_back({"r_min", "r_min > 0"});
  if (!(s.r_max > s.r_min)) v.push_back({"r_max", "r_max > r_min"});
  if (s.count < 2) v.push_back({"count", "count >= 2"});
  return v;
}

MassResult measure_of_ball(const MeasureSpec& nu, const DomainSpec& domain, const Point& center, double r,
                           double tol) {
  if (!(r > 0.0)) throw DomainError("measure_of_ball: r > 0 required");
  const int d = domain.dim();
  MassResult out;
  out.mass = ExtendedReal::finite(0.0);
  bool inside = ball_inside_domain(domain, center, r);

  MeasureSpec rest;
  for (const auto& t : nu.terms) {
    if (t.weight == 0.0) continue;
    if (inside) {
      if (const auto* c = std::get_if<ConstantDensity>(&t.shape)) {
        out.mass = out.mass + ExtendedReal::finite(t.weight * c->lambda * quad::unit_ball_volume(d) * std::pow(r, d));
        continue;
      }
      if (const auto* p = std::get_if<DensityPower>(&t.shape)) {
        ExtendedReal m = power_mass(d, p->a, p->pole, center, r);
        out.mass = out.mass + ExtendedReal{m.value * t.weight, m.infinite};
        continue;
      }
      if (const auto* s = std::get_if<SphereSurface>(&t.shape)) {
        double frac = quad::sphere_fraction_in_ball(d, s->radius, distance(s->center, center), r);
        out.mass = out.mass + ExtendedReal::finite(t.weight * quad::unit_sphere_area(d) * std::pow(s->radius, d - 1) * frac);
        continue;
      }
    } else if (const auto* p = std::get_if<DensityPower>(&t.shape)) {
      if (p->a >= d && distance(p->pole, center) < r && domain.contains(p->pole)) {
        out.mass = ExtendedReal::infinity();
        continue;
      }
    }
    rest.terms.push_back(t);
  }
  if (rest.terms.empty() || out.mass.infinite) return out;

  out.closed_form = false;
  Region region(domain);
  region.inside_ball(center, r);
  quad::StarOptions opts;
  opts.grade_domain_boundary = rest.has_boundary_power();
  std::vector<Point> poles = rest.poles();
  auto density = [&](const Point& y) { return rest.density(y, domain); };

  auto evaluate = [&](int level) {
    quad::StarOptions o = opts;
    o.angular_level = level;
    quad::QuadResult q = quad::integrate_with_singularities(center, region, r, poles, density, o);
    for (const auto& [s, w] : rest.surfaces()) {
      Point axis = (distance(s.center, center) > 0.0) ? center - s.center : Point::axis(d, 0);
      auto indicator = [&](const Point& y) { return region.contains(y) ? w : 0.0; };
      q += quad::integrate_sphere(s.center, s.radius, axis, indicator, level, false);
    }
    return q;
  };
  // Raise the angular level until successive values agree to tol; the last
  // difference is reported, so achieved_tol may exceed tol when the ball
  // boundary crosses the domain boundary (angular kink).
  quad::QuadResult coarse = evaluate(16);
  quad::QuadResult fine = coarse;
  for (int level : {40, 96}) {
    coarse = fine;
    fine = evaluate(level);
    if (fine.divergent) {
      out.mass = ExtendedReal::infinity();
      return out;
    }
    out.achieved_tol = std::abs(fine.value - coarse.value);
    if (out.achieved_tol <= tol * std::max(1.0, std::abs(fine.value))) break;
  }
  out.mass = out.mass + ExtendedReal::finite(fine.value);
  return out;
}

}  // namespace smpkit::model
