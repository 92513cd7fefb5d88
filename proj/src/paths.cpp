#include "smpkit/paths.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include "smpkit/errors.hpp"
#include "smpkit/parallel.hpp"
#include "smpkit/quadrature.hpp"

namespace smpkit::paths {

namespace {

bool near_any(const Point& x, const std::vector<Point>& poles, double reach) {
  for (const Point& p : poles)
    if (norm2(x - p) < reach * reach) return true;
  return false;
}

void push_trace(std::vector<TracePoint>* trace, long step, const Point& x, double a, const char* ev) {
  if (trace) trace->push_back({step, x, a, ev});
}

}  // namespace

EulerOutcome euler_path(const DomainSpec& domain, const Point& x, const EulerSpec& spec, RngStream& rng) {
  if (!domain.contains(x)) throw DomainError("euler_path: start point must lie in D");
  if (!(spec.dt > 0.0)) throw ConfigError("euler_path: dt > 0 required");
  const int d = x.dim();
  const double dt = spec.dt;
  const double clamp = 1.0 / (dt * dt);
  std::vector<Point> poles = spec.nu.poles();
  for (const Point& p : spec.beta.poles()) poles.push_back(p);
  const double reach = 2.0 * std::sqrt(dt);
  const auto surfaces = spec.nu.surfaces();
  if (!surfaces.empty()) {
    if (!(spec.shell_eps > 0.0)) throw ConfigError("surface potential needs a shell width eps > 0");
    if (dt > 0.25 * spec.shell_eps * spec.shell_eps) throw ConfigError("dt too coarse for the shell: need dt <= eps^2/4");
  }
  const bool has_density = spec.nu.has_density();
  const bool has_beta = spec.beta.has_density();

  EulerOutcome out;
  Point X = x;
  double dist = domain.boundary_distance(X);
  double A = 0.0;
  push_trace(spec.trace, 0, X, A, "start");

  auto increment = [&](const Point& y, double h) {
    double dA = 0.0;
    if (has_density) dA += std::min(spec.nu.density(y, domain), clamp) * h;
    for (const auto& [s, w] : surfaces)
      if (std::abs(distance(y, s.center) - s.radius) < spec.shell_eps) dA += w * h / (2.0 * spec.shell_eps);
    return dA;
  };
  // Step integrals use the path at a uniform random time inside the step,
  // drawn from the Brownian bridge between the grid points. This keeps
  // E[A] exact for singular V, where a grid-point Riemann sum is biased.
  auto accumulate = [&](const Point& x0, const Point& x1, double h) {
    double theta = rng.uniform();
    Point mid = x0 + (x1 - x0) * theta + rng.normal_point(d) * std::sqrt(2.0 * h * theta * (1.0 - theta));
    A += increment(mid, h);
    double weight = std::exp(-A);
    if (spec.running) out.running += weight * spec.running(mid) * h;
    if (has_beta) out.beta_integral += weight * std::min(spec.beta.density(mid, domain), clamp) * h;
  };

  while (out.time < spec.horizon) {
    if (out.steps >= spec.max_steps) throw BudgetExceeded("euler_path: step budget exceeded at t=" + std::to_string(out.time));
    double h = (!poles.empty() && near_any(X, poles, reach)) ? dt / 8.0 : dt;
    if (out.time + h > spec.horizon) h = spec.horizon - out.time;
    Point Y = X + rng.normal_point(d) * std::sqrt(2.0 * h);
    ++out.steps;
    bool crossed = !domain.contains(Y);
    double dist_new = crossed ? 0.0 : domain.boundary_distance(Y);
    if (!crossed && spec.bridge) {
      double u = rng.uniform();
      crossed = u < std::exp(-dist * dist_new / h);
    }
    if (crossed) {
      // Killed inside the step: credit half of it.
      accumulate(X, X, 0.5 * h);
      out.time += 0.5 * h;
      out.exited = true;
      out.end = domain.project_to_boundary(Y);
      out.pcaf = A;
      push_trace(spec.trace, out.steps, out.end, A, "exit");
      return out;
    }
    accumulate(X, Y, h);
    out.time += h;
    X = Y;
    dist = dist_new;
    push_trace(spec.trace, out.steps, X, A, "step");
  }
  out.end = X;
  out.pcaf = A;
  push_trace(spec.trace, out.steps, X, A, "horizon");
  return out;
}

PathRecord euler_killed_pcaf(const DomainSpec& domain, const Point& x, const model::MeasureSpec& nu, double dt,
                             RngStream& rng, std::vector<TracePoint>* trace) {
  if (nu.has_surface()) throw PreconditionError("euler_killed_pcaf: density terms only; use surface_pcaf for spheres");
  EulerSpec spec;
  spec.dt = dt;
  spec.nu = nu;
  spec.trace = trace;
  EulerOutcome o = euler_path(domain, x, spec, rng);
  PathRecord rec;
  rec.start = x;
  rec.exit_point = o.end;
  rec.event = PathEvent::Exited;
  rec.lifetime = o.time;
  rec.pcaf = o.pcaf;
  rec.pcaf_infinite = std::isinf(o.pcaf);
  rec.steps = o.steps;
  rec.stream = rng.id();
  return rec;
}

PathRecord surface_pcaf(const DomainSpec& domain, const Point& x, const model::SphereSurface& sphere, double weight,
                        double dt, double eps, RngStream& rng, double horizon) {
  if (!(eps > 0.0)) throw ConfigError("surface_pcaf: eps > 0 required");
  if (dt > 0.25 * eps * eps) throw ConfigError("surface_pcaf: dt too coarse for the shell, need dt <= eps^2/4");
  EulerSpec spec;
  spec.dt = dt;
  spec.nu = model::MeasureSpec::sphere(sphere.center, sphere.radius, weight);
  spec.shell_eps = eps;
  spec.horizon = horizon;
  EulerOutcome o = euler_path(domain, x, spec, rng);
  PathRecord rec;
  rec.start = x;
  rec.exit_point = o.end;
  rec.event = o.exited ? PathEvent::Exited : PathEvent::Horizon;
  rec.lifetime = o.time;
  rec.pcaf = o.pcaf;
  rec.steps = o.steps;
  rec.stream = rng.id();
  return rec;
}

WosResult wos_exit(const DomainSpec& domain, const Point& x, double eps, RngStream& rng, long max_steps) {
  if (!domain.contains(x)) throw DomainError("wos_exit: start point must lie in D");
  if (!(eps > 0.0)) throw ConfigError("wos_exit: eps > 0 required");
  WosResult out;
  Point X = x;
  for (;;) {
    double r = domain.boundary_distance(X);
    if (r <= eps) {
      out.exit_point = domain.project_to_boundary(X);
      return out;
    }
    if (out.steps >= max_steps) throw BudgetExceeded("wos_exit: step budget exceeded");
    X += rng.direction(X.dim()) * r;
    ++out.steps;
  }
}

StableExitSampler::StableExitSampler(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable sampler: α in (0, 1) required");
  // Table reaches the point where the exponential tail weighs below 2^-54.
  build((54.0 * std::log(2.0) + std::log(1.0 / (2.0 * alpha)) + 4.0) / (2.0 * alpha));
}

void StableExitSampler::build(double t_max) {
  const double a = alpha_;
  auto h = [a](double t) { return std::exp(-a * std::log(std::expm1(2.0 * t))); };
  t_.clear();
  F_.clear();
  // Geometric nodes resolve the t^{1-α} behaviour at 0, then a uniform grid.
  const double t0 = 1e-14;
  t_.push_back(0.0);
  for (double t = t0; t < 0.05; t *= 1.03) t_.push_back(t);
  const double step = 0.005;
  for (double t = 0.05; t < t_max; t += step) t_.push_back(t);
  t_.push_back(t_max);
  const quad::Rule& gl = quad::gauss_legendre(8);
  std::vector<double> cum(t_.size(), 0.0);
  // (e^{2s}-1)^{-α} = (2s)^{-α} (1 + O(s)) on the first tiny interval.
  cum[1] = std::pow(2.0 * t_[1], 1.0 - a) / (2.0 * (1.0 - a));
  for (std::size_t i = 2; i < t_.size(); ++i) {
    double lo = t_[i - 1];
    double hi = t_[i];
    double mid = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) s += gl.weights[k] * h(mid + half * gl.nodes[k]);
    cum[i] = cum[i - 1] + s * half;
  }
  // Remaining mass beyond t_max: ∫ e^{-2αs}(1-e^{-2s})^{-α} ds ≈ e^{-2α t_max}/(2α).
  tail_rate_ = 2.0 * a;
  double tail = std::exp(-tail_rate_ * t_max) / tail_rate_;
  double total = cum.back() + tail;
  F_.resize(t_.size());
  for (std::size_t i = 0; i < t_.size(); ++i) F_[i] = cum[i] / total;
}

double StableExitSampler::sample_log_ratio(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("stable sampler: u in (0, 1) required");
  double f_max = F_.back();
  if (u >= f_max) {
    // Exponential tail beyond the table, exact to O(e^{-2 t_max}).
    return t_.back() - std::log((1.0 - u) / (1.0 - f_max)) / tail_rate_;
  }
  auto it = std::upper_bound(F_.begin(), F_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - F_.begin());
  double f0 = F_[i - 1];
  double f1 = F_[i];
  double w = f1 > f0 ? (u - f0) / (f1 - f0) : 0.0;
  return t_[i - 1] + w * (t_[i] - t_[i - 1]);
}

double StableExitSampler::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= t_.back()) {
    double f_max = F_.back();
    return 1.0 - (1.0 - f_max) * std::exp(-tail_rate_ * (t - t_.back()));
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - t_.begin());
  double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
  return F_[i - 1] + w * (F_[i] - F_[i - 1]);
}

const StableExitSampler& stable_sampler(double alpha) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<StableExitSampler>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[alpha];
  if (!slot) slot = std::make_unique<StableExitSampler>(alpha);
  return *slot;
}

Point stable_exit_step(const Point& x, double r, double alpha, RngStream& rng) {
  if (!(r > 0.0)) throw DomainError("stable_exit_step: r > 0 required");
  if (!(2.0 * alpha < x.dim())) throw DomainError("stable_exit_step: 2α < d required");
  const StableExitSampler& s = stable_sampler(alpha);
  double t = s.sample_log_ratio(rng.uniform());
  Point u = rng.direction(x.dim());
  return x + u * (r * std::exp(t));
}

namespace {

std::size_t component_count(const DomainSpec& domain) {
  if (const auto* u = std::get_if<UnionOfBalls>(&domain.shape)) return u->balls.size();
  return 1;
}

}  // namespace

StableWalk stable_wos_exit(const DomainSpec& domain, const Point& x, double alpha, RngStream& rng, long max_steps) {
  if (!domain.contains(x)) throw DomainError("stable_wos_exit: start point must lie in D");
  const int d = x.dim();
  const double kappa = kernels::expected_residence_stable(d, alpha, 1.0, Point::zero(d));
  StableWalk out;
  out.sojourn.assign(component_count(domain), 0.0);
  out.visited.assign(component_count(domain), false);
  Point X = x;
  for (;;) {
    if (out.steps >= max_steps) throw BudgetExceeded("stable_wos_exit: step budget exceeded");
    int comp = domain.component_of(X);
    double r = domain.boundary_distance(X);
    double soj = kappa * std::pow(r, 2.0 * alpha);
    out.sojourn[static_cast<std::size_t>(comp)] += soj;
    out.visited[static_cast<std::size_t>(comp)] = true;
    out.lifetime += soj;
    Point Y = stable_exit_step(X, r, alpha, rng);
    ++out.steps;
    if (!domain.contains(Y)) {
      out.exit_point = Y;
      return out;
    }
    X = Y;
  }
}

StableWalk brownian_wos_sojourn(const DomainSpec& domain, const Point& x, double eps, RngStream& rng,
                                long max_steps) {
  if (!domain.contains(x)) throw DomainError("brownian_wos_sojourn: start point must lie in D");
  const int d = x.dim();
  StableWalk out;
  out.sojourn.assign(component_count(domain), 0.0);
  out.visited.assign(component_count(domain), false);
  Point X = x;
  for (;;) {
    int comp = domain.component_of(X);
    double r = domain.boundary_distance(X);
    // A step of length r can land on ∂D up to rounding (comp < 0).
    if (comp < 0 || r <= eps) {
      out.exit_point = domain.project_to_boundary(X);
      return out;
    }
    if (out.steps >= max_steps) throw BudgetExceeded("brownian_wos_sojourn: step budget exceeded");
    out.visited[static_cast<std::size_t>(comp)] = true;
    double soj = r * r / (2.0 * d);
    out.sojourn[static_cast<std::size_t>(comp)] += soj;
    out.lifetime += soj;
    X += rng.direction(d) * r;
    ++out.steps;
  }
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  s.mean = sum.value() / static_cast<double>(s.n);
  if (s.n > 1) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - s.mean) * (v - s.mean));
    s.variance = sq.value() / static_cast<double>(s.n - 1);
    s.stderr_ = std::sqrt(s.variance / static_cast<double>(s.n));
  }
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::size_t m = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m), values.end());
  double hi = values[m];
  if (values.size() % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

std::vector<double> replicate(std::size_t n, std::uint64_t seed, std::uint64_t task,
                              const std::function<double(std::size_t, RngStream&)>& fn) {
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    RngStream rng(seed, task, i);
    out[i] = fn(i, rng);
  });
  return out;
}

void write_trace_csv(std::ostream& os, std::size_t replicate, const std::vector<TracePoint>& trace, bool header) {
  if (trace.empty()) return;
  const int d = trace.front().x.dim();
  if (header) {
    os << "replicate,step";
    for (int i = 0; i < d; ++i) os << ",x" << (i + 1);
    os << ",pcaf,event\n";
  }
  for (const auto& t : trace) {
    os << replicate << ',' << t.step;
    for (int i = 0; i < d; ++i) os << ',' << t.x[i];
    os << ',' << t.pcaf << ',' << t.event << '\n';
  }
}

}  // namespace smpkit::paths
