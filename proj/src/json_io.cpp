#include "smpkit/json_io.hpp"

#include <cmath>

namespace smpkit::io {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json point(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim(); ++i) a.push_back(p[i]);
  return a;
}

Point point_from(const json& j) {
  std::vector<double> v = j.get<std::vector<double>>();
  return Point(std::span<const double>(v));
}

json extended(const model::ExtendedReal& v) {
  return {{"value", v.infinite ? json(nullptr) : number(v.value)}, {"infinite", v.infinite}};
}

json to_json(const DomainSpec& d) {
  if (auto b = std::get_if<Ball>(&d.shape)) return {{"type", "ball"}, {"center", point(b->center)}, {"radius", b->radius}};
  if (auto b = std::get_if<Box>(&d.shape)) return {{"type", "box"}, {"lo", point(b->lo)}, {"hi", point(b->hi)}};
  if (auto u = std::get_if<UnionOfBalls>(&d.shape)) {
    json balls = json::array();
    for (const auto& b : u->balls) balls.push_back({{"center", point(b.center)}, {"radius", b.radius}});
    return {{"type", "union"}, {"balls", balls}};
  }
  const auto& a = std::get<Annulus>(d.shape);
  return {{"type", "annulus"}, {"center", point(a.center)}, {"r_in", a.r_in}, {"r_out", a.r_out}};
}

json to_json(const model::OperatorSpec& op) {
  return {{"kind", op.brownian() ? "laplacian" : "fractional"}, {"alpha", op.alpha}, {"domain", to_json(op.domain)}};
}

json to_json(const model::MeasureSpec& nu) {
  json terms = json::array();
  for (const auto& t : nu.terms) {
    json j;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, model::DensityPower>) {
            j = {{"type", "power"}, {"a", s.a}, {"pole", point(s.pole)}};
          } else if constexpr (std::is_same_v<T, model::BoundaryPower>) {
            j = {{"type", "boundary_power"}, {"a", s.a}};
          } else if constexpr (std::is_same_v<T, model::TabulatedDensity>) {
            j = {{"type", "tabulated"}, {"lo", point(s.box.lo)}, {"hi", point(s.box.hi)}, {"shape", s.shape},
                 {"values", s.values}};
          } else if constexpr (std::is_same_v<T, model::ConstantDensity>) {
            j = {{"type", "constant"}, {"lambda", s.lambda}};
          } else {
            j = {{"type", "sphere"}, {"center", point(s.center)}, {"radius", s.radius}};
          }
        },
        t.shape);
    j["weight"] = t.weight;
    terms.push_back(j);
  }
  return terms;
}

json to_json(const model::RadiiSchedule& r) {
  return {{"r_max", r.r_max},
          {"r_min", r.r_min},
          {"count", r.count},
          {"spacing", r.spacing == model::Spacing::Geometric ? "geometric" : "linear"}};
}

json to_json(const paths::Summary& s) {
  return {{"mean", number(s.mean)}, {"stderr", number(s.stderr_)}, {"n", s.n}};
}

json to_json(const fk::FkEstimate& e) {
  return {{"point", point(e.point)},  {"functional", e.functional}, {"estimate", number(e.estimate)},
          {"stderr", number(e.stderr_)}, {"n", e.n},                  {"dt", e.dt},
          {"eps", e.eps},               {"ci_level", e.ci_level},     {"ci", {number(e.lo()), number(e.hi())}},
          {"seed", e.seed}};
}

json to_json(const fk::RepresentationReport& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"x", point(p.x)},
                   {"u", number(p.u)},
                   {"exit_term", to_json(p.first)},
                   {"beta_term", to_json(p.second)},
                   {"residual", to_json(p.residual)},
                   {"flagged", p.flagged}});
  return {{"t", number(r.t)},
          {"exit_value", r.exit_value == fk::ExitValue::Cemetery ? "cemetery" : "stopped"},
          {"points", pts},
          {"flagged", r.flagged}};
}

json to_json(const potentials::PotentialValue& v) {
  return {{"value", extended(v.value)},
          {"achieved_tol", number(v.achieved_tol)},
          {"warning", v.warning},
          {"method", v.method == potentials::PotentialMethod::ClosedFormRadial ? "closed-form" : "quadrature"}};
}

json to_json(const potentials::LocalGreenIntegral& t) {
  json fit = {{"ok", t.fit.ok},
              {"a", number(t.fit.constant.value)},
              {"a_stderr", number(t.fit.constant.stderr_)},
              {"b", number(t.fit.log_coef.value)},
              {"b_stderr", number(t.fit.log_coef.stderr_)},
              {"c", number(t.fit.power_coef.value)},
              {"c_stderr", number(t.fit.power_coef.stderr_)},
              {"gamma", t.fit.gamma},
              {"log_rss", number(t.fit.log_rss)},
              {"power_rss", number(t.fit.power_rss)}};
  return {{"x", point(t.x)},         {"r", t.r},
          {"deltas", t.deltas},      {"J", t.J},
          {"increments", t.increments}, {"divergent_piece", t.divergent_piece},
          {"quad_tol", number(t.quad_tol)}, {"fit", fit}};
}

json to_json(const potentials::NeumannResult& r) {
  return {{"value", number(r.value)}, {"lower", number(r.lower)},         {"upper", number(r.upper)},
          {"terms", r.terms},         {"contraction", number(r.contraction)}};
}

json to_json(const mp::ClassificationReport& r) {
  return {{"x", point(r.x)},         {"verdict", mp::to_string(r.verdict)}, {"reason", r.reason},
          {"method", r.method},      {"radii", r.radii},                     {"tail_estimate", number(r.tail_estimate)},
          {"table", to_json(r.table)}};
}

json to_json(const mp::FineLimitResult& r) {
  json av = json::array(), tol = json::array();
  for (double v : r.averages) av.push_back(number(v));
  for (double v : r.average_tol) tol.push_back(number(v));
  return {{"x", point(r.x)},
          {"operator", r.op == model::OperatorKind::BrownianLaplacian ? "laplacian" : "fractional"},
          {"alpha", r.alpha},
          {"radii", r.radii},
          {"averages", av},
          {"average_tol", tol},
          {"limit", number(r.limit)},
          {"order", r.order},
          {"residual", number(r.residual)},
          {"tail_max", number(r.tail_max)},
          {"exponent", r.exponent},
          {"undecided", r.undecided}};
}

json to_json(const mp::WeakTestSummary& s) {
  json vals = json::array();
  for (const auto& v : s.values)
    vals.push_back({{"center", point(v.bump.center)},
                    {"radius", v.bump.radius},
                    {"c0", v.bump.c0},
                    {"slope", v.bump.slope.dim() ? point(v.bump.slope) : json::array()},
                    {"generator_part", number(v.generator_part)},
                    {"potential_part", number(v.potential_part)},
                    {"value", number(v.value)}});
  return {{"min_value", number(s.min_value)}, {"argmin", s.argmin}, {"tol", s.tol}, {"pass", s.pass},
          {"bumps", vals}};
}

json to_json(const mp::DichotomyReport& r) {
  json grid = json::array();
  for (const auto& g : r.grid)
    grid.push_back({{"x", point(g.x)},
                    {"u", number(g.u)},
                    {"limit", number(g.fine.limit)},
                    {"residual", number(g.fine.residual)},
                    {"tail_max", number(g.fine.tail_max)},
                    {"undecided", g.fine.undecided},
                    {"in_zero_set", g.in_zero_set}});
  json cls = json::array();
  for (const auto& c : r.classifications) cls.push_back(to_json(c));
  return {{"candidate", r.candidate}, {"verdict", mp::to_string(r.verdict)}, {"reason", r.reason},
          {"truncation", number(r.truncation)}, {"threshold", number(r.threshold)}, {"zero_set", r.zero_set},
          {"grid", grid}, {"classifications", cls}, {"weak_test", to_json(r.weak)}};
}

json to_json(const capacity::CapacitySolution& s, bool with_optimizer) {
  json j = {{"value", number(s.value)},
            {"dual_value", number(s.dual_value)},
            {"duality_gap", number(s.duality_gap)},
            {"feasibility_residual", number(s.feasibility_residual)},
            {"iterations", s.iterations},
            {"converged", s.converged},
            {"method", s.method},
            {"support_size", s.cells.size()}};
  if (with_optimizer) {
    j["cells"] = s.cells;
    j["optimizer"] = s.optimizer;
  }
  return j;
}

}  // namespace smpkit::io
