#include "smpkit/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "smpkit/errors.hpp"

namespace smpkit::quad {

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double sphere_fraction_in_ball(int d, double s, double dist, double r) {
  if (s <= 0.0) return dist < r ? 1.0 : 0.0;
  if (dist <= 0.0) return s < r ? 1.0 : 0.0;
  double t = (s * s + dist * dist - r * r) / (2.0 * s * dist);
  if (t >= 1.0) return 0.0;
  if (t <= -1.0) return 1.0;
  double cap = 0.5 * boost::math::ibeta(0.5 * (d - 1), 0.5, 1.0 - t * t);
  return t >= 0.0 ? cap : 1.0 - cap;
}

namespace {

Rule golub_welsch(int n) {
  Rule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v * v;
  }
  // Symmetrize to remove eigen-solver round-off.
  for (int i = 0; i < n / 2; ++i) {
    double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

SphereRule circle_rule(int m) {
  SphereRule r;
  for (int k = 0; k < m; ++k) {
    double phi = 2.0 * std::numbers::pi * (k + 0.5) / m;
    r.directions.push_back(Point{std::cos(phi), std::sin(phi)});
    r.weights.push_back(2.0 * std::numbers::pi / m);
  }
  return r;
}

SphereRule build_sphere_rule(int d, int level) {
  if (d < 2 || d > kMaxDim) throw DomainError("sphere rule dimension out of range");
  if (d == 2) return circle_rule(2 * level);
  const SphereRule& inner = sphere_rule(d - 1, level);
  const Rule& gl = gauss_legendre(level);
  SphereRule r;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    // d = 3: Gauss in t = cos θ is exact for polynomials. d > 3: the weight
    // (1 - t^2)^{(d-3)/2} is not smooth in t, so integrate in θ instead.
    double t, st, wt;
    if (d == 3) {
      t = gl.nodes[i];
      st = std::sqrt(1.0 - t * t);
      wt = gl.weights[i];
    } else {
      double theta = 0.5 * std::numbers::pi * (gl.nodes[i] + 1.0);
      t = std::cos(theta);
      st = std::sin(theta);
      wt = 0.5 * std::numbers::pi * gl.weights[i] * std::pow(st, d - 2);
    }
    for (std::size_t j = 0; j < inner.directions.size(); ++j) {
      Point u(d);
      u[0] = t;
      for (int k = 0; k < d - 1; ++k) u[k + 1] = st * inner.directions[j][k];
      r.directions.push_back(u);
      r.weights.push_back(wt * inner.weights[j]);
    }
  }
  return r;
}

double gauss_piece(const Fn1& f, double a, double b, const Rule& rule) {
  double half = 0.5 * (b - a);
  double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return s * half;
}

// Shells [a + L q^{k+1}, a + L q^k] toward the singular end a (mirror == false)
// or toward b (mirror == true).
QuadResult graded(const Fn1& f, double a, double b, bool mirror, const SegmentOptions& opts) {
  const Rule& rule = gauss_legendre(opts.gauss_points);
  double len = b - a;
  double q = opts.shell_ratio;
  double total = 0.0;
  double prev = 0.0;
  double last = 0.0;
  double outer = len;
  int k = 0;
  for (; k < opts.max_shells; ++k) {
    double inner = outer * q;
    double s = mirror ? gauss_piece(f, b - outer, b - inner, rule) : gauss_piece(f, a + inner, a + outer, rule);
    prev = last;
    last = s;
    total += s;
    outer = inner;
    if (k >= 8 && prev != 0.0) {
      double ratio = last / prev;
      if (ratio >= 0.0 && ratio < 0.95 && std::abs(last) * ratio / (1.0 - ratio) <= opts.rel_eps * std::abs(total))
        return {total, false};
    }
    if (k >= 8 && last == 0.0 && prev == 0.0) return {total, false};
  }
  QuadResult out{total, false};
  if (prev != 0.0 && last != 0.0) {
    double ratio = last / prev;
    if (ratio >= 1.0 - 1e-9) {
      out.divergent = true;
    } else if (ratio > 0.0) {
      out.value += last * ratio / (1.0 - ratio);
    }
  }
  return out;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(golub_welsch(n));
  return *slot;
}

const SphereRule& sphere_rule(int d, int level) {
  static std::recursive_mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<SphereRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{d, level}];
  if (!slot) slot = std::make_unique<SphereRule>(build_sphere_rule(d, level));
  return *slot;
}

QuadResult integrate_segment(const Fn1& f, double a, double b, bool singular_lo, bool singular_hi,
                             const SegmentOptions& opts) {
  if (!(b > a)) return {};
  if (singular_lo && singular_hi) {
    double m = 0.5 * (a + b);
    QuadResult r = graded(f, a, m, false, opts);
    r += graded(f, m, b, true, opts);
    return r;
  }
  if (singular_lo) return graded(f, a, b, false, opts);
  if (singular_hi) return graded(f, a, b, true, opts);
  const Rule& rule = gauss_legendre(opts.gauss_points);
  QuadResult r;
  if (a > 0.0 && b > 4.0 * a) {
    // Geometric pieces resolve power-law behaviour inherited from a nearby centre.
    double lo = a;
    while (lo < b) {
      double hi = std::min(2.0 * lo, b);
      if (b - hi < 0.25 * lo) hi = b;
      r.value += gauss_piece(f, lo, hi, rule);
      lo = hi;
    }
    return r;
  }
  r.value = gauss_piece(f, a, b, rule);
  return r;
}

QuadResult integrate_star(const Point& center, const Region& region, double s_max, const FnPoint& f,
                          const StarOptions& opts) {
  const int d = center.dim();
  const SphereRule& sr = sphere_rule(d, opts.angular_level);
  QuadResult total;
  std::vector<double> cuts;
  for (std::size_t k = 0; k < sr.directions.size(); ++k) {
    const Point& u = sr.directions[k];
    auto radial = [&](double s) {
      if (s <= 0.0) return 0.0;
      return f(center + u * s) * std::pow(s, d - 1);
    };
    cuts.clear();
    for (const auto& b : opts.breaks) ray_sphere_crossings(center, u, b.center, b.radius, cuts);
    std::sort(cuts.begin(), cuts.end());
    QuadResult ray;
    for (const auto& iv : region.ray_intervals(center, u, s_max)) {
      double a = iv.lo.s;
      bool lo = opts.grade_center && iv.lo.s == 0.0;
      for (double c : cuts) {
        if (c <= a || c >= iv.hi.s) continue;
        ray += integrate_segment(radial, a, c, lo, false, opts.segment);
        a = c;
        lo = false;
      }
      bool hi = opts.grade_domain_boundary && iv.hi.domain_boundary;
      ray += integrate_segment(radial, a, iv.hi.s, lo, hi, opts.segment);
    }
    total.value += sr.weights[k] * ray.value;
    total.divergent = total.divergent || ray.divergent;
  }
  return total;
}

double smooth_cutoff(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  // C^3 smoothstep in t^2: polynomial along straight rays between the break spheres.
  double z = (t * t - 0.25) / 0.75;
  return 1.0 - z * z * z * z * (35.0 - z * (84.0 - z * (70.0 - 20.0 * z)));
}

QuadResult integrate_with_singularities(const Point& center, const Region& region, double s_max,
                                        const std::vector<Point>& extra, const FnPoint& f,
                                        const StarOptions& opts) {
  std::vector<Singularity> sing;
  for (const Point& p : extra) {
    double dc = distance(p, center);
    if (dc < 1e-12 * std::max(1.0, s_max) || dc >= s_max) continue;
    if (!region.contains(p)) continue;
    double rad = 0.5 * dc;
    for (const Point& q : extra)
      if (!(q == p) && distance(p, q) > 0.0) rad = std::min(rad, 0.5 * distance(p, q));
    sing.push_back({p, rad});
  }
  if (sing.empty()) return integrate_star(center, region, s_max, f, opts);

  auto main_part = [&](const Point& y) {
    double w = 1.0;
    for (const auto& s : sing) w -= smooth_cutoff(distance(y, s.where) / s.radius);
    return w == 0.0 ? 0.0 : w * f(y);
  };
  StarOptions mo = opts;
  for (const auto& s : sing) {
    mo.breaks.push_back({s.where, 0.5 * s.radius});
    mo.breaks.push_back({s.where, s.radius});
  }
  QuadResult total = integrate_star(center, region, s_max, main_part, mo);
  Region clipped = region;
  clipped.inside_ball(center, s_max);
  for (const auto& s : sing) {
    auto piece = [&](const Point& y) {
      double w = smooth_cutoff(distance(y, s.where) / s.radius);
      return w == 0.0 ? 0.0 : w * f(y);
    };
    StarOptions po = opts;
    po.grade_center = true;
    po.breaks = {{s.where, 0.5 * s.radius}};
    total += integrate_star(s.where, clipped, s.radius, piece, po);
  }
  return total;
}

}  // namespace smpkit::quad

namespace smpkit::quad {

std::vector<Point> orthonormal_complement(const Point& e) {
  const int d = e.dim();
  std::vector<Point> basis;
  std::vector<Point> all{e};
  for (int i = 0; i < d && static_cast<int>(basis.size()) < d - 1; ++i) {
    Point v = Point::axis(d, i);
    for (const Point& b : all) v -= b * dot(v, b);
    double n = norm(v);
    if (n < 1e-8) continue;
    v *= 1.0 / n;
    basis.push_back(v);
    all.push_back(v);
  }
  return basis;
}

QuadResult integrate_sphere_band(const Point& c, double rho, const Point& axis, const FnPoint& g,
                                 int level, double theta_lo, double theta_hi, bool grade_axis,
                                 const SegmentOptions& seg) {
  const int d = c.dim();
  Point e = axis * (1.0 / norm(axis));
  std::vector<Point> frame = orthonormal_complement(e);
  const SphereRule* inner = d >= 3 ? &sphere_rule(d - 1, level) : nullptr;
  auto ring = [&](double theta) {
    double ct = std::cos(theta);
    double st = std::sin(theta);
    double jac = std::pow(rho, d - 1) * std::pow(st, d - 2);
    if (d == 2) {
      // S^0 = {+1, -1}
      Point y1 = c + (e * ct + frame[0] * st) * rho;
      Point y2 = c + (e * ct - frame[0] * st) * rho;
      return jac * (g(y1) + g(y2));
    }
    double s = 0.0;
    for (std::size_t j = 0; j < inner->directions.size(); ++j) {
      Point v(d);
      for (int k = 0; k < d - 1; ++k) v += frame[k] * inner->directions[j][k];
      s += inner->weights[j] * g(c + (e * ct + v * st) * rho);
    }
    return jac * s;
  };
  bool lo_sing = grade_axis && theta_lo == 0.0;
  SegmentOptions so = seg;
  so.gauss_points = std::max(seg.gauss_points, 4);
  if (!lo_sing) {
    // Split the band into pieces so smooth integrands converge quickly.
    QuadResult r;
    int pieces = std::max(1, static_cast<int>(std::ceil((theta_hi - theta_lo) / 0.4)));
    double h = (theta_hi - theta_lo) / pieces;
    for (int k = 0; k < pieces; ++k)
      r += integrate_segment(ring, theta_lo + k * h, theta_lo + (k + 1) * h, false, false, so);
    return r;
  }
  double split = std::min(theta_hi, 0.5);
  QuadResult r = integrate_segment(ring, 0.0, split, true, false, so);
  if (theta_hi > split) r += integrate_sphere_band(c, rho, axis, g, level, split, theta_hi, false, seg);
  return r;
}

QuadResult integrate_sphere(const Point& c, double rho, const Point& axis, const FnPoint& g, int level,
                            bool grade_axis, const SegmentOptions& seg) {
  return integrate_sphere_band(c, rho, axis, g, level, 0.0, std::numbers::pi, grade_axis, seg);
}

}  // namespace smpkit::quad
