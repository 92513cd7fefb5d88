#include "smpkit/maxprinciple.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "smpkit/errors.hpp"
#include "smpkit/parallel.hpp"
#include "smpkit/quadrature.hpp"

namespace smpkit::mp {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::InE: return "InE";
    case Verdict::InN: return "InN";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

const char* to_string(DichotomyVerdict v) {
  switch (v) {
    case DichotomyVerdict::Consistent: return "Consistent";
    case DichotomyVerdict::Trivial: return "Trivial";
    case DichotomyVerdict::Violation: return "VIOLATION";
    case DichotomyVerdict::Undecided: return "Undecided";
  }
  return "?";
}

namespace {

std::string fmt_point(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < p.dim(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

double neighbourhood_radius(const Point& x, const DomainSpec& domain, const model::RadiiSchedule& radii) {
  double cap = 0.9 * domain.boundary_distance(x);
  if (!(cap > 0.0)) throw DomainError("classify_point: x must lie in D");
  for (double r : radii.values())
    if (r <= cap) return r;
  return cap;
}

}  // namespace

ClassificationReport classify_point(const Point& x, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                    const model::RadiiSchedule& radii, const ClassifyOptions& opts) {
  double r = neighbourhood_radius(x, op.domain, radii);
  std::vector<double> deltas;
  double dl = r;
  for (int k = 0; k < opts.delta_count; ++k) deltas.push_back(dl *= opts.delta_ratio);
  return classify_point(x, nu, op, radii, deltas, opts);
}

ClassificationReport classify_point(const Point& x, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                    const model::RadiiSchedule& radii, const std::vector<double>& deltas,
                                    const ClassifyOptions& opts) {
  ClassificationReport rep;
  rep.x = x;
  double r = neighbourhood_radius(x, op.domain, radii);
  rep.radii = {r};
  potentials::LocalOptions lo;
  lo.angular_level = opts.angular_level;
  rep.table = potentials::local_green_integral(x, r, deltas, nu, op, lo);
  const auto& t = rep.table;

  if (t.divergent_piece) {
    rep.reason = "an annulus piece diverged away from x; a smaller neighbourhood is needed";
    return rep;
  }
  if (t.J.empty()) {
    rep.reason = "empty δ schedule";
    return rep;
  }
  const double Jn = t.J.back();
  if (Jn == 0.0) {
    rep.verdict = Verdict::InE;
    rep.reason = "ν vanishes near x";
    return rep;
  }

  // Cauchy branch: geometric decay of the last increments bounds the remainder.
  const auto& inc = t.increments;
  const int w = opts.cauchy_window;
  if (static_cast<int>(inc.size()) > w) {
    double q = 0.0;
    bool ok = true;
    for (std::size_t j = inc.size() - w; j < inc.size(); ++j) {
      if (inc[j - 1] <= 0.0) {
        ok = ok && inc[j] <= 0.0;
        continue;
      }
      q = std::max(q, inc[j] / inc[j - 1]);
    }
    if (ok && q <= opts.cauchy_ratio) {
      rep.tail_estimate = inc.back() * q / (1.0 - q);
      if (rep.tail_estimate <= opts.cauchy_rel * Jn) {
        rep.verdict = Verdict::InE;
        rep.reason = "increments decay geometrically; J converges";
        return rep;
      }
    }
  }

  const auto& f = t.fit;
  if (!f.ok) {
    rep.reason = "no fit: J neither Cauchy nor fittable";
    return rep;
  }
  const double sig = opts.significance;
  if (f.power_rss < f.log_rss) {
    if (f.gamma > 0.0 && f.power_coef.value > sig * f.power_coef.stderr_) {
      rep.verdict = Verdict::InN;
      rep.reason = "significant power divergence";
      return rep;
    }
  } else if (f.log_coef.value > sig * f.log_coef.stderr_) {
    rep.verdict = Verdict::InN;
    rep.reason = "significant log divergence";
    return rep;
  }
  rep.reason = "neither convergence nor divergence established";
  return rep;
}

double ball_volume_constant(int d) { return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

double sphere_area_constant(int d) {
  double b = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  double a = ball_volume_constant(d);
  if (std::abs(b / a - d) > 1e-12 * d) throw Error("sphere/ball constants inconsistent: b_d/a_d != d");
  return b;
}

namespace {

double ball_average_rule(const Fn& u, const Point& x, double r, int radial, int level) {
  const int d = x.dim();
  const auto& gl = quad::gauss_legendre(radial);
  const auto& sr = quad::sphere_rule(d, level);
  CompensatedSum acc;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    double s = 0.5 * r * (gl.nodes[i] + 1.0);
    double ws = 0.5 * r * gl.weights[i] * std::pow(s, d - 1);
    CompensatedSum shell;
    for (std::size_t k = 0; k < sr.directions.size(); ++k) shell.add(sr.weights[k] * u(x + sr.directions[k] * s));
    acc.add(ws * shell.value());
  }
  return acc.value() / (ball_volume_constant(d) * std::pow(r, d));
}

}  // namespace

kernels::Approx volume_average(const Fn& u, const Point& x, double r, const AverageOptions& opts) {
  if (!(r > 0.0)) throw DomainError("volume_average: r > 0 required");
  sphere_area_constant(x.dim());
  double fine = ball_average_rule(u, x, r, opts.radial_points, opts.angular_level);
  double coarse = ball_average_rule(u, x, r, std::max(2, opts.radial_points / 2), std::max(2, opts.angular_level / 2));
  return {fine, std::abs(fine - coarse)};
}

namespace {

quad::QuadResult exit_average_rule(const Fn& u, const Point& x, const kernels::ExitKernel& K, const DomainSpec* domain,
                                   int level) {
  const int d = x.dim();
  const double r = K.r();
  const auto& sr = quad::sphere_rule(d, level);
  quad::QuadResult total;
  std::optional<Region> region;
  double s_far = 0.0;
  if (domain) {
    region.emplace(*domain);
    region->outside_ball(x, r);
    Box bb = domain->bounding_box();
    for (int i = 0; i < d; ++i) {
      double m = std::max(std::abs(bb.lo[i] - x[i]), std::abs(bb.hi[i] - x[i]));
      s_far += m * m;
    }
    s_far = 1.01 * std::sqrt(s_far) + r;
  }
  for (std::size_t k = 0; k < sr.directions.size(); ++k) {
    const Point& dir = sr.directions[k];
    auto g = [&](double s) { return K.density(s) * std::pow(s, d - 1) * u(x + dir * s); };
    quad::QuadResult ray;
    if (region) {
      for (const auto& iv : region->ray_intervals(x, dir, s_far)) {
        bool sing = iv.lo.s <= r * (1.0 + 1e-12);
        ray += quad::integrate_segment(g, iv.lo.s, iv.hi.s, sing, iv.hi.domain_boundary);
      }
    } else {
      ray += quad::integrate_segment(g, r, 2.0 * r, true, false);
      // s = 2r/τ maps the tail onto (0, 1].
      auto tail = [&](double tau) { return g(2.0 * r / tau) * 2.0 * r / (tau * tau); };
      ray += quad::integrate_segment(tail, 0.0, 1.0, true, false);
    }
    total.value += sr.weights[k] * ray.value;
    total.divergent = total.divergent || ray.divergent;
  }
  return total;
}

}  // namespace

kernels::Approx fractional_average(const Fn& u, const Point& x, double r, double alpha, kernels::ExitVariant variant,
                                   const DomainSpec* domain, const AverageOptions& opts) {
  const int d = x.dim();
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("fractional_average: α in (0, 1) required");
  if (!(2.0 * alpha < d)) throw DomainError("fractional_average: 2α < d required");
  if (!(r > 0.0)) throw DomainError("fractional_average: r > 0 required");
  kernels::ExitKernel K(d, alpha, r, variant);
  auto fine = exit_average_rule(u, x, K, domain, opts.angular_level);
  if (fine.divergent) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  auto coarse = exit_average_rule(u, x, K, domain, std::max(2, opts.angular_level / 2));
  return {fine.value, std::abs(fine.value - coarse.value)};
}

FineLimitResult fine_limit(const Fn& u, const Point& x, const model::OperatorSpec& op,
                           const model::RadiiSchedule& radii, const FineLimitOptions& opts) {
  FineLimitResult res;
  res.x = x;
  res.op = op.kind;
  res.alpha = op.alpha;
  res.radii = radii.values();
  const bool brownian = op.brownian();
  res.exponent = brownian ? 2.0 : 2.0 * op.alpha;
  if (brownian && op.domain.boundary_distance(x) < res.radii.front())
    throw PreconditionError("fine_limit: B(x, r_max) must lie in D");
  for (double r : res.radii) {
    kernels::Approx a = brownian ? volume_average(u, x, r, opts.average)
                                 : fractional_average(u, x, r, op.alpha, kernels::ExitVariant::Normalized,
                                                      &op.domain, opts.average);
    res.averages.push_back(a.value);
    res.average_tol.push_back(a.achieved_tol);
  }
  const std::size_t n = res.radii.size();
  const std::size_t tail = std::min<std::size_t>(std::max(opts.tail, 1), n);
  res.tail_max = *std::max_element(res.averages.end() - static_cast<std::ptrdiff_t>(tail), res.averages.end());

  // Neville tableau in h = r^q over the smallest radii.
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(opts.max_order) + 1, n);
  std::vector<double> h(m), P(m);
  double qtol = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t k = n - m + i;
    h[i] = std::pow(res.radii[k], res.exponent);
    P[i] = res.averages[k];
    qtol = std::max(qtol, res.average_tol[k]);
  }
  double prev = P[m - 1];
  double best = P[m - 1];
  for (std::size_t level = 1; level < m; ++level) {
    for (std::size_t i = 0; i + level < m; ++i)
      P[i] = (h[i + level] * P[i] - h[i] * P[i + 1]) / (h[i + level] - h[i]);
    prev = best;
    best = P[m - 1 - level];
  }
  res.order = static_cast<int>(m) - 1;
  res.limit = best;
  res.residual = std::abs(best - prev) + qtol;
  if (!std::isfinite(res.limit)) res.residual = std::numeric_limits<double>::infinity();
  res.undecided = !(res.residual <= opts.abs_tol + opts.rel_tol * std::abs(res.limit));
  return res;
}

std::vector<kernels::TestBump> bump_family(const DomainSpec& domain, int per_axis, double radius, bool tilted) {
  if (per_axis < 1 || !(radius > 0.0)) throw ConfigError("bump_family: per_axis >= 1 and radius > 0 required");
  const int d = domain.dim();
  Box bb = domain.bounding_box();
  std::vector<kernels::TestBump> out;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Point c(d);
    for (int i = 0; i < d; ++i) c[i] = bb.lo[i] + (idx[i] + 0.5) * (bb.hi[i] - bb.lo[i]) / per_axis;
    if (domain.contains(c) && domain.boundary_distance(c) >= radius) {
      out.push_back(kernels::TestBump::make(c, radius));
      if (tilted) out.push_back(kernels::TestBump::make(c, radius, 1.0, Point::axis(d, 0, 0.5 / radius)));
    }
    int i = 0;
    while (i < d && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

namespace {

std::vector<Point> inside(const std::vector<Point>& pts, const Point& c, double rad) {
  std::vector<Point> out;
  for (const Point& p : pts)
    if (distance(p, c) < rad && !(p == c)) out.push_back(p);
  return out;
}

double surface_part(const Fn& u, const model::MeasureSpec& nu, const kernels::TestBump& xi, int level) {
  double total = 0.0;
  for (const auto& [s, w] : nu.surfaces()) {
    double D = distance(s.center, xi.center);
    const double R = s.radius, rho = xi.radius;
    if (D >= R + rho || R >= D + rho) continue;
    Point axis = D > 0.0 ? (xi.center - s.center) * (1.0 / D) : Point::axis(s.center.dim(), 0);
    double theta_hi = std::numbers::pi;
    if (D > 0.0) {
      double c = (R * R + D * D - rho * rho) / (2.0 * R * D);
      theta_hi = c <= -1.0 ? std::numbers::pi : std::acos(std::min(1.0, c));
    }
    auto g = [&](const Point& y) { return u(y) * xi(y); };
    total += w * quad::integrate_sphere_band(s.center, R, axis, g, level, 0.0, theta_hi, false).value;
  }
  return total;
}

BumpValue brownian_bump(const Fn& u, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                        const kernels::TestBump& xi, const WeakTestOptions& opts) {
  BumpValue bv;
  bv.bump = xi;
  Region region(op.domain);
  region.inside_ball(xi.center, xi.radius);
  std::vector<Point> sing = nu.poles();
  for (const Point& p : opts.u_singular) sing.push_back(p);
  auto extra = inside(sing, xi.center, xi.radius);
  quad::StarOptions so;
  so.angular_level = opts.angular_level;
  so.grade_center = false;
  for (const Point& p : sing)
    if (p == xi.center) so.grade_center = true;
  const DomainSpec& D = op.domain;
  auto gen = [&](const Point& y) { return u(y) * (-xi.laplacian(y)); };
  auto pot = [&](const Point& y) {
    double v = nu.density(y, D);
    return v == 0.0 ? 0.0 : u(y) * v * xi(y);
  };
  auto both = [&](const Point& y) { return gen(y) + pot(y); };
  auto g = quad::integrate_with_singularities(xi.center, region, xi.radius, extra, gen, so);
  quad::QuadResult p;
  if (nu.has_density()) p = quad::integrate_with_singularities(xi.center, region, xi.radius, extra, pot, so);
  if (p.divergent)
    throw PreconditionError("weak test: u·ν is not integrable on the bump B(" + fmt_point(xi.center) + ", " +
                            std::to_string(xi.radius) + ")");
  auto b = nu.has_density() ? quad::integrate_with_singularities(xi.center, region, xi.radius, extra, both, so) : g;
  double s = surface_part(u, nu, xi, 2 * opts.angular_level);
  bv.generator_part = g.value;
  bv.potential_part = p.value + s;
  bv.value = b.value + s;
  return bv;
}

BumpValue stable_bump(const Fn& u, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                      const kernels::TestBump& xi, const WeakTestOptions& opts) {
  BumpValue bv;
  bv.bump = xi;
  const DomainSpec& D = op.domain;
  Box bb = D.bounding_box();
  double far = 0.0;
  for (int i = 0; i < bb.lo.dim(); ++i) {
    double m = std::max(std::abs(bb.lo[i] - xi.center[i]), std::abs(bb.hi[i] - xi.center[i]));
    far += m * m;
  }
  far = 1.01 * std::sqrt(far);
  Region region(D);
  std::vector<Point> sing = nu.poles();
  for (const Point& p : opts.u_singular) sing.push_back(p);
  auto extra = inside(sing, xi.center, far);
  quad::StarOptions so;
  so.angular_level = opts.frac_outer_level;
  so.grade_center = false;
  so.grade_domain_boundary = true;
  so.breaks = {Ball{xi.center, xi.radius}};
  auto gen = [&](const Point& y) {
    return u(y) * kernels::apply_minus_frac_laplacian(xi, y, op.alpha, opts.frac_inner_level).value;
  };
  auto pot = [&](const Point& y) {
    if (distance(y, xi.center) >= xi.radius) return 0.0;
    double v = nu.density(y, D);
    return v == 0.0 ? 0.0 : u(y) * v * xi(y);
  };
  auto g = quad::integrate_with_singularities(xi.center, region, far, extra, gen, so);
  quad::QuadResult p;
  if (nu.has_density()) {
    Region inner(D);
    inner.inside_ball(xi.center, xi.radius);
    quad::StarOptions si;
    si.angular_level = opts.angular_level;
    si.grade_center = false;
    p = quad::integrate_with_singularities(xi.center, inner, xi.radius, inside(sing, xi.center, xi.radius), pot, si);
  }
  if (p.divergent)
    throw PreconditionError("weak test: u·ν is not integrable on the bump B(" + fmt_point(xi.center) + ", " +
                            std::to_string(xi.radius) + ")");
  double s = surface_part(u, nu, xi, 2 * opts.angular_level);
  bv.generator_part = g.value;
  bv.potential_part = p.value + s;
  bv.value = g.value + p.value + s;
  return bv;
}

}  // namespace

WeakTestSummary weak_supersolution_test(const Fn& u, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                        const std::vector<kernels::TestBump>& bumps, const WeakTestOptions& opts) {
  if (bumps.empty()) throw ConfigError("weak_supersolution_test: empty bump family");
  for (const auto& b : bumps)
    if (!op.domain.contains(b.center) || op.domain.boundary_distance(b.center) < b.radius)
      throw PreconditionError("weak test: bump B(" + fmt_point(b.center) + ", " + std::to_string(b.radius) +
                              ") is not supported in D");
  WeakTestSummary s;
  s.tol = opts.tol;
  s.values.resize(bumps.size());
  parallel_for(bumps.size(), [&](std::size_t i) {
    s.values[i] = op.brownian() ? brownian_bump(u, nu, op, bumps[i], opts) : stable_bump(u, nu, op, bumps[i], opts);
  });
  s.min_value = s.values[0].value;
  for (std::size_t i = 1; i < s.values.size(); ++i)
    if (s.values[i].value < s.min_value) {
      s.min_value = s.values[i].value;
      s.argmin = i;
    }
  s.pass = s.min_value >= -opts.tol;
  return s;
}

std::vector<Point> grid_points(const DomainSpec& domain, int per_axis, double margin) {
  if (per_axis < 2) throw ConfigError("grid_points: per_axis >= 2 required");
  const int d = domain.dim();
  Box bb = domain.bounding_box();
  std::vector<Point> out;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Point c(d);
    for (int i = 0; i < d; ++i) c[i] = bb.lo[i] + idx[i] * (bb.hi[i] - bb.lo[i]) / (per_axis - 1);
    if (domain.contains(c) && domain.boundary_distance(c) >= margin) out.push_back(c);
    int i = 0;
    while (i < d && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

DichotomyReport dichotomy_check(const Candidate& cand, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                const std::vector<Point>& grid, const DichotomyOptions& opts) {
  if (grid.empty()) throw ConfigError("dichotomy_check: empty grid");
  DichotomyReport rep;
  rep.candidate = cand.name;

  auto bumps = bump_family(op.domain, opts.bumps_per_axis, opts.bump_radius, true);
  WeakTestOptions wopts = opts.weak;
  for (const Point& p : cand.singular) wopts.u_singular.push_back(p);
  rep.weak = weak_supersolution_test(cand.u, nu, op, bumps, wopts);
  if (!rep.weak.pass)
    throw PreconditionError("dichotomy_check: u fails the weak supersolution test (min " +
                            std::to_string(rep.weak.min_value) + ")");

  double k = 0.0;
  for (const Point& x : grid) {
    double v = cand.u(x);
    if (v < -1e-12) throw PreconditionError("dichotomy_check: u < 0 at " + fmt_point(x));
    k = std::max(k, v);
  }
  rep.truncation = k;
  rep.threshold = opts.zero_threshold * k;
  rep.grid.resize(grid.size());
  if (k <= 0.0) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rep.grid[i].x = grid[i];
      rep.grid[i].in_zero_set = true;
      rep.zero_set.push_back(i);
    }
    rep.verdict = DichotomyVerdict::Trivial;
    rep.reason = "u vanishes on the grid";
    return rep;
  }

  Fn uk = [&](const Point& y) { return std::min(cand.u(y), k); };
  parallel_for(grid.size(), [&](std::size_t i) {
    GridValue& g = rep.grid[i];
    g.x = grid[i];
    g.u = cand.u(grid[i]);
    g.fine = fine_limit(uk, grid[i], op, opts.radii, opts.fine);
    g.in_zero_set = g.fine.tail_max < rep.threshold;
  });
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (rep.grid[i].in_zero_set) rep.zero_set.push_back(i);

  if (rep.zero_set.size() == grid.size()) {
    rep.verdict = DichotomyVerdict::Trivial;
    rep.reason = "ǔ vanishes on the whole grid";
    return rep;
  }

  bool undecided = false, violation = false;
  std::string why;
  for (std::size_t i : rep.zero_set) {
    const GridValue& g = rep.grid[i];
    auto c = classify_point(g.x, nu, op, opts.classify_radii, opts.classify);
    if (g.fine.undecided) {
      undecided = true;
      why = "fine limit undecided at a zero point " + fmt_point(g.x);
    }
    if (c.verdict == Verdict::Undecided) {
      undecided = true;
      why = "classification undecided at " + fmt_point(g.x);
    } else if (c.verdict == Verdict::InE) {
      if (!g.fine.undecided && g.fine.limit + g.fine.residual < rep.threshold) {
        violation = true;
        why = "zero of ǔ at " + fmt_point(g.x) + " classified InE";
      } else {
        undecided = true;
        why = "zero candidate at " + fmt_point(g.x) + " in E_ν without a conclusive fine limit";
      }
    }
    rep.classifications.push_back(std::move(c));
  }
  if (violation) {
    rep.verdict = DichotomyVerdict::Violation;
  } else if (undecided) {
    rep.verdict = DichotomyVerdict::Undecided;
  } else {
    rep.verdict = DichotomyVerdict::Consistent;
    why = rep.zero_set.empty() ? "ǔ > 0 on the grid" : "every zero lies in N_ν";
  }
  rep.reason = why;
  return rep;
}

}  // namespace smpkit::mp
