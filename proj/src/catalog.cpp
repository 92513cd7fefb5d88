#include "smpkit/catalog.hpp"

#include <algorithm>
#include <memory>

#include "smpkit/errors.hpp"
#include "smpkit/kernels.hpp"
#include "smpkit/potentials.hpp"

namespace smpkit::catalog {

const std::vector<Entry>& list() {
  static const std::vector<Entry> entries = {
      {"paper-example-x2", "u(x) = |x|^2",
       "solves -Δu + 2d|y|^{-2} u = 0 pointwise off 0; zero set {0}"},
      {"harmonic-coordinate", "u(x) = x_axis", "harmonic; mean-value property"},
      {"harmonic-quadratic", "u(x) = x_1^2 - x_2^2", "harmonic; mean-value property"},
      {"green-section", "u(x) = G_D(pole, x)", "kernels closed form; -Au = δ_pole"},
      {"residence-ball", "u(x) = E_x τ_D on a ball", "radial ODE; -Au = 1"},
      {"constant-one", "u(x) = 1", "constant; ∫Δξ = 0"},
      {"zero", "u(x) = 0", "trivial"},
      {"resolvent-bump", "u = R^ν ξ for a bump ξ (Neumann series)", "(-A + ν)u = ξ >= 0; strictly positive"},
  };
  return entries;
}

bool exists(const std::string& name) {
  const auto& l = list();
  return std::any_of(l.begin(), l.end(), [&](const Entry& e) { return e.name == name; });
}

namespace {

const Ball& require_ball(const model::OperatorSpec& op, const std::string& name) {
  const Ball* b = op.domain.as_ball();
  if (!b) throw ConfigError("catalog entry '" + name + "' needs a ball domain");
  return *b;
}

}  // namespace

mp::Candidate make(const std::string& name, const Args& args, const model::OperatorSpec& op,
                   const model::MeasureSpec& nu) {
  const double c = args.scale;
  const int d = op.dim;
  mp::Candidate cand;
  cand.name = name;
  if (name == "paper-example-x2") {
    cand.u = [c](const Point& y) { return c * norm2(y); };
  } else if (name == "harmonic-coordinate") {
    if (args.axis < 0 || args.axis >= d) throw ConfigError("harmonic-coordinate: axis out of range");
    int k = args.axis;
    cand.u = [c, k](const Point& y) { return c * y[k]; };
  } else if (name == "harmonic-quadratic") {
    if (d < 2) throw ConfigError("harmonic-quadratic needs d >= 2");
    cand.u = [c](const Point& y) { return c * (y[0] * y[0] - y[1] * y[1]); };
  } else if (name == "green-section") {
    const Ball& b = require_ball(op, name);
    Point pole = args.pole.dim() ? args.pole : b.center + Point::axis(d, 0, 0.3 * b.radius);
    auto G = std::make_shared<kernels::GreenKernel>(kernels::GreenKernel::for_operator(op));
    cand.u = [c, G, pole](const Point& y) { return y == pole ? 0.0 : c * (*G)(pole, y); };
    cand.singular = {pole};
  } else if (name == "residence-ball") {
    const Ball& b = require_ball(op, name);
    Point ctr = b.center;
    double R = b.radius, a = op.alpha;
    if (op.brownian())
      cand.u = [c, ctr, R, d](const Point& y) {
        double v = R * R - norm2(y - ctr);
        return v > 0.0 ? c * v / (2.0 * d) : 0.0;
      };
    else
      cand.u = [c, ctr, R, d, a](const Point& y) {
        Point z = y - ctr;
        return norm2(z) < R * R ? c * kernels::expected_residence_stable(d, a, R, z) : 0.0;
      };
  } else if (name == "constant-one") {
    cand.u = [c](const Point&) { return c; };
  } else if (name == "zero") {
    cand.u = [](const Point&) { return 0.0; };
  } else if (name == "resolvent-bump") {
    const Ball& b = require_ball(op, name);
    if (!op.brownian()) throw ConfigError("resolvent-bump supports the Laplacian only");
    if (nu.has_surface()) throw ConfigError("resolvent-bump needs a density potential");
    Point ctr = args.bump_center.dim() ? args.bump_center : b.center;
    auto bump = kernels::TestBump::make(ctr, args.bump_radius);
    auto solver = std::make_shared<potentials::NeumannResolvent>(op, nu);
    auto src = std::make_shared<potentials::NeumannResolvent::Source>(
        solver->source([bump](const Point& y) { return bump(y); }));
    const DomainSpec dom = op.domain;
    cand.u = [c, solver, src, dom](const Point& y) {
      return dom.contains(y) ? c * solver->apply(*src, y).value : 0.0;
    };
  } else {
    throw ConfigError("unknown catalog entry '" + name + "'");
  }
  return cand;
}

}  // namespace smpkit::catalog
