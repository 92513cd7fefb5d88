#include "smpkit/potentials.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "smpkit/errors.hpp"
#include "smpkit/parallel.hpp"
#include "smpkit/quadrature.hpp"

namespace smpkit::potentials {

namespace {

double residence_for(const model::OperatorSpec& op, const Point& x) {
  const Ball* b = op.domain.as_ball();
  Point xs = x - b->center;
  return op.brownian() ? kernels::expected_residence(op.dim, b->radius, xs)
                       : kernels::expected_residence_stable(op.dim, op.alpha, b->radius, xs);
}

const Ball& require_ball(const model::OperatorSpec& op) {
  const Ball* b = op.domain.as_ball();
  if (!b) throw PreconditionError("quadrature potentials need a ball domain; use the path estimators otherwise");
  return *b;
}

// Polar angle band on S(c, rho) where t_lo < |y - x| < t_hi, measured from the axis c -> x.
std::pair<double, double> sphere_band(double D, double rho, double t_lo, double t_hi) {
  auto theta = [&](double t) {
    double c = (D * D + rho * rho - t * t) / (2.0 * rho * D);
    return std::acos(std::clamp(c, -1.0, 1.0));
  };
  return {theta(t_lo), theta(t_hi)};
}

quad::QuadResult surface_part(const model::MeasureSpec& mu, const kernels::GreenKernel& G, const Point& x,
                              double t_lo, double t_hi, int level) {
  quad::QuadResult q;
  const int d = x.dim();
  for (const auto& [s, w] : mu.surfaces()) {
    double D = distance(x, s.center);
    auto g = [&](const Point& y) { return w * G(x, y); };
    if (D == 0.0) {
      if (s.radius > t_lo && s.radius < t_hi)
        q += quad::integrate_sphere(s.center, s.radius, Point::axis(d, 0), g, level, false);
      continue;
    }
    Point axis = (x - s.center) * (1.0 / D);
    auto [th_lo, th_hi] = sphere_band(D, s.radius, t_lo, t_hi);
    if (!(th_hi > th_lo)) continue;
    bool near = std::abs(D - s.radius) < 0.5 * s.radius;
    q += quad::integrate_sphere_band(s.center, s.radius, axis, g, level, th_lo, th_hi, near);
  }
  return q;
}

}  // namespace

PotentialValue potential(const model::MeasureSpec& mu, const model::OperatorSpec& op, const Point& x,
                         const PotentialOptions& opts) {
  const Ball& ball = require_ball(op);
  if (!op.domain.contains(x)) throw DomainError("potential: x must lie in D");
  auto violations = model::validate(mu, op.domain);
  if (!violations.empty()) throw PreconditionError("potential: invalid measure (" + violations.front().rule + ")");

  PotentialValue out;
  out.method = PotentialMethod::ClosedFormRadial;
  double closed = 0.0;
  model::MeasureSpec rest;
  for (const auto& t : mu.terms) {
    if (t.weight == 0.0) continue;
    if (const auto* c = std::get_if<model::ConstantDensity>(&t.shape)) {
      closed += t.weight * c->lambda * residence_for(op, x);
    } else {
      rest.terms.push_back(t);
    }
  }
  if (rest.terms.empty()) {
    out.value = model::ExtendedReal::finite(closed);
    return out;
  }

  out.method = PotentialMethod::AdaptiveQuadrature;
  auto G = kernels::GreenKernel::for_operator(op);
  std::vector<Point> poles;
  for (const Point& p : rest.poles())
    if (op.domain.contains(p)) poles.push_back(p);
  quad::StarOptions so;
  so.grade_domain_boundary = rest.has_boundary_power() || !op.brownian();
  const double s_max = 2.0 * ball.radius;
  const bool has_density = rest.has_density();

  auto evaluate = [&](int level) {
    quad::QuadResult q;
    if (has_density) {
      so.angular_level = level;
      auto f = [&](const Point& y) {
        double v = rest.density(y, op.domain);
        return v == 0.0 ? 0.0 : G(x, y) * v;
      };
      q += quad::integrate_with_singularities(x, Region(op.domain), s_max, poles, f, so);
    }
    q += surface_part(rest, G, x, 0.0, std::numeric_limits<double>::infinity(), level);
    return q;
  };

  quad::QuadResult prev = evaluate(opts.min_level);
  if (prev.divergent) {
    out.value = model::ExtendedReal::infinity();
    return out;
  }
  double achieved = std::numeric_limits<double>::infinity();
  for (int level = 2 * opts.min_level; level <= opts.max_level; level *= 2) {
    quad::QuadResult cur = evaluate(level);
    if (cur.divergent) {
      out.value = model::ExtendedReal::infinity();
      return out;
    }
    achieved = std::abs(cur.value - prev.value);
    prev = cur;
    if (achieved <= opts.tol) break;
  }
  out.value = model::ExtendedReal::finite(closed + prev.value);
  out.achieved_tol = achieved;
  out.warning = !(achieved <= opts.tol);
  return out;
}

LocalFit fit_local(const std::vector<double>& deltas, const std::vector<double>& J, double se_floor) {
  LocalFit fit;
  const std::size_t n = deltas.size();
  if (n < 4 || J.size() != n) return fit;

  struct Ols {
    bool ok;
    double a, b, se_a, se_b, rss;
  };
  auto ols = [&](const std::function<double(double)>& basis) -> Ols {
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = basis(deltas[i]);
      y(i) = J[i];
    }
    Eigen::Matrix2d XtX = X.transpose() * X;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(XtX);
    double cond = svd.singularValues()(0) / std::max(svd.singularValues()(1), 1e-300);
    if (!std::isfinite(cond) || cond > 1e14) return {false, 0, 0, 0, 0, 0};
    Eigen::Vector2d beta = XtX.ldlt().solve(X.transpose() * y);
    double rss = (y - X * beta).squaredNorm();
    double sigma2 = std::max(rss / static_cast<double>(n - 2), se_floor * se_floor);
    Eigen::Matrix2d cov = sigma2 * XtX.inverse();
    return {true, beta(0), beta(1), std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)), rss};
  };

  Ols lg = ols([](double dl) { return std::log(1.0 / dl); });
  if (!lg.ok) return fit;
  Ols best{false, 0, 0, 0, 0, std::numeric_limits<double>::infinity()};
  double best_gamma = 0.0;
  for (int k = -60; k <= 60; ++k) {
    if (k == 0) continue;
    double g = 0.05 * k;
    Ols p = ols([g](double dl) { return std::pow(dl, -g); });
    if (p.ok && p.rss < best.rss) {
      best = p;
      best_gamma = g;
    }
  }
  fit.ok = true;
  fit.constant = {lg.a, lg.se_a};
  fit.log_coef = {lg.b, lg.se_b};
  fit.log_rss = lg.rss;
  if (best.ok) {
    fit.power_coef = {best.b, best.se_b};
    fit.gamma = best_gamma;
    fit.power_rss = best.rss;
  } else {
    fit.power_rss = std::numeric_limits<double>::infinity();
  }
  return fit;
}

LocalGreenIntegral local_green_integral(const Point& x, double r, const std::vector<double>& deltas,
                                        const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                        const LocalOptions& opts) {
  require_ball(op);
  if (!(r > 0.0)) throw DomainError("local_green_integral: r > 0 required");
  if (!op.domain.contains(x) || op.domain.boundary_distance(x) < r)
    throw PreconditionError("local_green_integral: B(x, r) must lie in D");
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    if (!(deltas[j] > 0.0 && deltas[j] < r)) throw PreconditionError("local_green_integral: need 0 < δ < r");
    if (j > 0 && !(deltas[j] < deltas[j - 1])) throw PreconditionError("local_green_integral: δ schedule must decrease");
  }

  auto G = kernels::GreenKernel::for_operator(op);
  std::vector<Point> poles;
  for (const Point& p : nu.poles())
    if (op.domain.contains(p)) poles.push_back(p);
  quad::StarOptions so;
  so.grade_domain_boundary = nu.has_boundary_power();

  LocalGreenIntegral out;
  out.x = x;
  out.r = r;
  out.deltas = deltas;
  std::vector<quad::QuadResult> coarse(deltas.size()), fine(deltas.size());
  parallel_for(2 * deltas.size(), [&](std::size_t task) {
    std::size_t j = task / 2;
    int level = (task % 2 == 0) ? opts.angular_level / 2 : opts.angular_level;
    double outer = j == 0 ? r : deltas[j - 1];
    double inner = deltas[j];
    Region region(op.domain);
    region.inside_ball(x, outer).outside_ball(x, inner);
    quad::StarOptions o = so;
    o.angular_level = level;
    auto f = [&](const Point& y) {
      double v = nu.density(y, op.domain);
      return v == 0.0 ? 0.0 : G(x, y) * v;
    };
    quad::QuadResult q;
    if (nu.has_density()) q += quad::integrate_with_singularities(x, region, outer, poles, f, o);
    q += surface_part(nu, G, x, inner, outer, level);
    (task % 2 == 0 ? coarse : fine)[j] = q;
  });

  double acc = 0.0;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    out.divergent_piece = out.divergent_piece || fine[j].divergent;
    double piece = std::max(fine[j].value, 0.0);
    out.quad_tol = std::max(out.quad_tol, std::abs(fine[j].value - coarse[j].value));
    out.increments.push_back(piece);
    acc += piece;
    out.J.push_back(acc);
  }
  double floor = std::max(out.quad_tol, 1e-12 * (out.J.empty() ? 0.0 : out.J.back()));
  out.fit = fit_local(out.deltas, out.J, floor);
  return out;
}

NeumannResolvent::NeumannResolvent(const model::OperatorSpec& op, const model::MeasureSpec& nu,
                                   const NeumannOptions& opts)
    : op_(op), nu_(nu), opts_(opts), kernel_(kernels::GreenKernel::for_operator(op)) {
  const Ball& ball = require_ball(op);
  if (nu.has_surface())
    throw PreconditionError("Neumann series supports density measures only; use the path estimators for surfaces");
  const int d = op.dim;
  const quad::Rule& gl = quad::gauss_legendre(opts.radial_nodes);
  const quad::SphereRule& sr = quad::sphere_rule(d, opts.angular_level);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    double s = 0.5 * ball.radius * (1.0 + gl.nodes[i]);
    double ws = 0.5 * ball.radius * gl.weights[i] * std::pow(s, d - 1);
    for (std::size_t k = 0; k < sr.directions.size(); ++k) {
      nodes_.push_back(ball.center + sr.directions[k] * s);
      weights_.push_back(ws * sr.weights[k]);
    }
  }
  const std::size_t n = nodes_.size();
  nu_nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) nu_nodes_[i] = nu_density(nodes_[i]);
  matrix_.assign(n * n, 0.0);
  row_sum_.assign(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double* row = &matrix_[i * n];
    CompensatedSum sum;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      row[j] = green(nodes_[i], nodes_[j]) * weights_[j];
      sum.add(row[j]);
    }
    row_sum_[i] = sum.value();
  });
}

double NeumannResolvent::residence(const Point& x) const { return residence_for(op_, x); }

double NeumannResolvent::nu_density(const Point& y) const { return nu_.density(y, op_.domain); }

double NeumannResolvent::apply_row(const Point& x, const std::vector<double>& v, double vx) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    double g = green(x, nodes_[j]);
    if (!std::isfinite(g)) continue;
    sum += g * weights_[j] * (v[j] - vx);
  }
  return sum + vx * residence(x);
}

std::vector<double> NeumannResolvent::apply_nodes(const std::vector<double>& v) const {
  const std::size_t n = nodes_.size();
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    const double* row = &matrix_[i * n];
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
    out[i] = s - v[i] * row_sum_[i] + v[i] * residence(nodes_[i]);
  });
  return out;
}

NeumannResolvent::Source NeumannResolvent::source(const Fn& f) const {
  Source s;
  s.nodal.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) s.nodal[i] = f(nodes_[i]);
  s.at = f;
  fill_iterates(s);
  return s;
}

void NeumannResolvent::fill_iterates(Source& s) const {
  s.iterates.clear();
  s.iterates.push_back(apply_nodes(s.nodal));
  double prev = INFINITY;
  int rising = 0;
  for (int k = 1; k < opts_.max_terms; ++k) {
    const auto& w = s.iterates.back();
    double sup = 0.0;
    for (double v : w) sup = std::max(sup, std::abs(v));
    // The point terms lag the nodal ones by one application of R; stop well below tol.
    if (sup <= 1e-3 * opts_.tol) break;
    rising = sup >= prev ? rising + 1 : 0;
    if (rising >= 3) break;
    prev = sup;
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = nu_nodes_[i] * w[i];
    s.iterates.push_back(apply_nodes(g));
  }
}

NeumannResolvent::Source NeumannResolvent::potential_times_nu(const Fn& f) const {
  Source base = source(f);
  std::vector<double> rf = apply_nodes(base.nodal);
  Source s;
  s.nodal.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) s.nodal[i] = nu_nodes_[i] * rf[i];
  auto fnodal = std::make_shared<std::vector<double>>(base.nodal);
  s.at = [this, fnodal, f](const Point& x) { return nu_density(x) * apply_row(x, *fnodal, f(x)); };
  fill_iterates(s);
  return s;
}

double NeumannResolvent::potential(const Fn& f, const Point& x) const {
  Source s = source(f);
  return apply_row(x, s.nodal, f(x));
}

NeumannResult NeumannResolvent::apply(const Source& src, const Point& x) const {
  if (!op_.domain.contains(x)) throw DomainError("neumann_resolvent: x must lie in D");
  if (src.iterates.empty()) {
    Source filled = src;
    fill_iterates(filled);
    return apply(filled, x);
  }
  NeumannResult out;
  const auto& its = src.iterates;
  // Kernel row at x, shared by every term.
  const std::size_t n = nodes_.size();
  std::vector<double> row(n);
  double row_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double g = green(x, nodes_[j]);
    row[j] = std::isfinite(g) ? g * weights_[j] : 0.0;
    row_sum += row[j];
  }
  const double res = residence(x);
  auto at_x = [&](const std::vector<double>& v, double vx) {
    double sdot = 0.0;
    for (std::size_t j = 0; j < n; ++j) sdot += row[j] * v[j];
    return sdot - vx * row_sum + vx * res;
  };
  double wx = at_x(src.nodal, src.at(x));
  double nux = nu_density(x);
  double sum = wx;
  double prev_term = wx;
  int rising = 0;
  out.partial_sums.push_back(sum);
  out.terms = 1;
  for (int k = 1; k < opts_.max_terms; ++k) {
    if (std::abs(prev_term) <= opts_.tol) break;
    if (static_cast<std::size_t>(k) > its.size()) break;
    const auto& w = its[k - 1];
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = nu_nodes_[i] * w[i];
    double term = at_x(g, nux * wx);
    wx = term;
    sum += (k % 2 == 0 ? 1.0 : -1.0) * term;
    out.partial_sums.push_back(sum);
    out.terms = k + 1;
    if (prev_term > 0.0) {
      out.contraction = term / prev_term;
      rising = out.contraction >= 1.0 ? rising + 1 : 0;
      if (rising >= 3)
        throw ConvergenceError("Neumann series is not contracting; use the Monte Carlo resolvent instead",
                               out.contraction);
    }
    prev_term = term;
  }
  if (std::abs(prev_term) > opts_.tol)
    throw ConvergenceError("Neumann series did not reach tolerance within max_terms; use the Monte Carlo resolvent",
                           std::abs(prev_term));
  std::size_t m = out.partial_sums.size();
  double a = out.partial_sums[m - 1];
  double b = m >= 2 ? out.partial_sums[m - 2] : a;
  out.lower = std::min(a, b);
  out.upper = std::max(a, b);
  out.value = 0.5 * (out.lower + out.upper);
  return out;
}

double NeumannResolvent::identity_residual(const Fn& f, const Point& x) const {
  double a = apply(source(f), x).value;
  double b = apply(potential_times_nu(f), x).value;
  double c = potential(f, x);
  return std::abs(a + b - c);
}

NeumannResult neumann_resolvent(const std::function<double(const Point&)>& f, const model::MeasureSpec& nu,
                                const model::OperatorSpec& op, const Point& x, const NeumannOptions& opts) {
  if (nu.empty()) {
    NeumannResolvent nr(op, nu, opts);
    double v = nr.potential(f, x);
    NeumannResult r;
    r.value = r.lower = r.upper = v;
    r.terms = 1;
    r.partial_sums = {v};
    return r;
  }
  return NeumannResolvent(op, nu, opts).apply(f, x);
}

}  // namespace smpkit::potentials
