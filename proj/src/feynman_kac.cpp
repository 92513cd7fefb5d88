#include "smpkit/feynman_kac.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "smpkit/errors.hpp"
#include "smpkit/paths.hpp"
#include "smpkit/rng.hpp"

namespace smpkit::fk {

namespace {

void require_brownian(const model::OperatorSpec& op, const char* who) {
  if (!op.brownian())
    throw PreconditionError(std::string(who) +
                            ": path estimators of time-dependent functionals support the Laplacian only");
}

void require_budget(const FkOptions& o) {
  if (o.n < 2) throw ConfigError("fk: at least 2 replicates required");
  if (!(o.dt > 0.0)) throw ConfigError("fk: dt > 0 required");
  if (!(o.ci_level > 0.0 && o.ci_level < 1.0)) throw ConfigError("fk: ci_level must lie in (0, 1)");
}

FkEstimate make_estimate(const Point& x, const std::string& tag, const std::vector<double>& v, const FkOptions& o) {
  auto s = paths::summarize(v);
  FkEstimate e;
  e.point = x;
  e.functional = tag;
  e.estimate = s.mean;
  e.stderr_ = s.stderr_;
  e.n = s.n;
  e.dt = o.dt;
  e.eps = o.eps;
  e.ci_level = o.ci_level;
  e.seed = o.seed;
  return e;
}

paths::EulerSpec euler_spec(const model::MeasureSpec& nu, const FkOptions& o) {
  paths::EulerSpec spec;
  spec.dt = o.dt;
  spec.nu = nu;
  spec.shell_eps = o.eps;
  return spec;
}

}  // namespace

double normal_quantile_two_sided(double level) {
  boost::math::normal_distribution<double> n01;
  return boost::math::quantile(n01, 0.5 + 0.5 * level);
}

double FkEstimate::half_width() const { return normal_quantile_two_sided(ci_level) * stderr_; }

FkEstimate fk_semigroup(const Point& x, double t, const Fn& f, const model::MeasureSpec& nu,
                        const model::OperatorSpec& op, const FkOptions& opts) {
  require_brownian(op, "fk_semigroup");
  require_budget(opts);
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("fk_semigroup: finite t > 0 required");
  if (!op.domain.contains(x)) throw DomainError("fk_semigroup: x must lie in D");
  auto spec = euler_spec(nu, opts);
  spec.horizon = t;
  auto v = paths::replicate(opts.n, opts.seed, task_id(opts.task), [&](std::size_t, RngStream& rng) {
    auto out = paths::euler_path(op.domain, x, spec, rng);
    if (out.exited) return 0.0;
    return std::exp(-out.pcaf) * f(out.end);
  });
  return make_estimate(x, "semigroup", v, opts);
}

FkEstimate fk_resolvent(const Point& x, const Fn& f, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                        const FkOptions& opts) {
  require_brownian(op, "fk_resolvent");
  require_budget(opts);
  if (!op.domain.contains(x)) throw DomainError("fk_resolvent: x must lie in D");
  auto spec = euler_spec(nu, opts);
  spec.running = f;
  auto v = paths::replicate(opts.n, opts.seed, task_id(opts.task), [&](std::size_t, RngStream& rng) {
    return paths::euler_path(op.domain, x, spec, rng).running;
  });
  return make_estimate(x, "resolvent", v, opts);
}

RepresentationReport check_representation(const Fn& u, const model::MeasureSpec& nu, const model::MeasureSpec& beta,
                                          const DomainSpec& sub_domain, double t, const std::vector<Point>& points,
                                          const FkOptions& opts, ExitValue exit_value) {
  require_budget(opts);
  if (beta.has_surface()) throw PreconditionError("check_representation: β must be of density type");
  if (!(t > 0.0)) throw ConfigError("check_representation: t > 0 required");
  auto spec = euler_spec(nu, opts);
  spec.horizon = t;
  spec.beta = beta;

  RepresentationReport rep;
  rep.t = t;
  rep.exit_value = exit_value;
  const std::uint64_t base = task_id(opts.task);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& x = points[i];
    if (!sub_domain.contains(x)) throw DomainError("check_representation: sample point outside D'");
    std::vector<double> first(opts.n), second(opts.n);
    auto resid = paths::replicate(opts.n, opts.seed, mix64(base ^ i), [&](std::size_t k, RngStream& rng) {
      auto out = paths::euler_path(sub_domain, x, spec, rng);
      double end_value = (out.exited && exit_value == ExitValue::Cemetery) ? 0.0 : u(out.end);
      first[k] = std::exp(-out.pcaf) * end_value;
      second[k] = out.beta_integral;
      return first[k] + second[k];
    });
    RepresentationPoint p;
    p.x = x;
    p.u = u(x);
    p.first = make_estimate(x, "representation.exit_term", first, opts);
    p.second = make_estimate(x, "representation.beta_term", second, opts);
    for (double& r : resid) r = p.u - r;
    p.residual = make_estimate(x, "representation.residual", resid, opts);
    p.flagged = !p.residual.ci_contains(0.0);
    if (p.flagged) ++rep.flagged;
    rep.points.push_back(std::move(p));
  }
  return rep;
}

}  // namespace smpkit::fk
