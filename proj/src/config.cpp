#include "smpkit/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smpkit/errors.hpp"
#include "smpkit/rng.hpp"

namespace smpkit::config {

namespace {

const std::vector<std::pair<Kind, std::string>>& kind_table() {
  static const std::vector<std::pair<Kind, std::string>> t = {
      {Kind::Classify, "classify"},   {Kind::FineLimit, "fine-limit"}, {Kind::WeakTest, "weak-test"},
      {Kind::Dichotomy, "dichotomy"}, {Kind::Fk, "fk"},                {Kind::Resolvent, "resolvent"},
      {Kind::Capacity, "capacity"},   {Kind::RevuzCheck, "revuz-check"}, {Kind::ExitKernelCheck, "exit-kernel-check"},
  };
  return t;
}

/// Collects violations while walking the document.
class Checker {
 public:
  std::vector<model::Violation> out;

  void add(const std::string& path, const std::string& rule) { out.push_back({path, rule}); }

  const json* get(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) add(join(path, key), "required field missing");
      return nullptr;
    }
    return &*it;
  }

  bool number(const json* j, const std::string& path, bool positive = false) {
    if (!j) return false;
    if (!j->is_number()) {
      add(path, "must be a number");
      return false;
    }
    if (positive && !(j->get<double>() > 0.0)) {
      add(path, "must be > 0");
      return false;
    }
    return true;
  }

  bool integer(const json* j, const std::string& path, long min) {
    if (!j) return false;
    if (!j->is_number_integer() || j->get<long>() < min) {
      add(path, "must be an integer >= " + std::to_string(min));
      return false;
    }
    return true;
  }

  bool vector(const json* j, const std::string& path, int dim = -1) {
    if (!j) return false;
    if (!j->is_array() || j->empty() || !std::all_of(j->begin(), j->end(), [](const json& x) { return x.is_number(); })) {
      add(path, "must be a non-empty array of numbers");
      return false;
    }
    if (dim >= 0 && static_cast<int>(j->size()) != dim) {
      add(path, "dimension mismatch (expected " + std::to_string(dim) + ")");
      return false;
    }
    if (static_cast<int>(j->size()) > kMaxDim) {
      add(path, "dimension above " + std::to_string(kMaxDim));
      return false;
    }
    return true;
  }

  static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }
};

Point pt(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Point(std::span<const double>(v));
}

/// Structural check of a domain; returns its dimension or -1.
int check_domain(Checker& c, const json& j, const std::string& path) {
  if (!j.is_object()) {
    c.add(path, "must be an object");
    return -1;
  }
  const json* type = c.get(j, "type", path, true);
  if (!type) return -1;
  std::string t = type->is_string() ? type->get<std::string>() : "";
  auto P = [&](const std::string& k) { return Checker::join(path, k); };
  if (t == "ball") {
    const json* ctr = c.get(j, "center", path, true);
    bool ok = c.vector(ctr, P("center"));
    ok = c.number(c.get(j, "radius", path, true), P("radius"), true) && ok;
    return ok ? static_cast<int>(ctr->size()) : -1;
  }
  if (t == "box") {
    const json* lo = c.get(j, "lo", path, true);
    bool ok = c.vector(lo, P("lo"));
    ok = ok && c.vector(c.get(j, "hi", path, true), P("hi"), static_cast<int>(lo->size()));
    return ok ? static_cast<int>(lo->size()) : -1;
  }
  if (t == "union") {
    const json* balls = c.get(j, "balls", path, true);
    if (!balls) return -1;
    if (!balls->is_array() || balls->empty()) {
      c.add(P("balls"), "must be a non-empty array");
      return -1;
    }
    int dim = -1;
    for (std::size_t i = 0; i < balls->size(); ++i) {
      std::string bp = P("balls[" + std::to_string(i) + "]");
      const json* ctr = c.get((*balls)[i], "center", bp, true);
      if (c.vector(ctr, Checker::join(bp, "center"), dim) && dim < 0) dim = static_cast<int>(ctr->size());
      c.number(c.get((*balls)[i], "radius", bp, true), Checker::join(bp, "radius"), true);
    }
    return dim;
  }
  if (t == "annulus") {
    const json* ctr = c.get(j, "center", path, true);
    bool ok = c.vector(ctr, P("center"));
    ok = c.number(c.get(j, "r_in", path, true), P("r_in"), true) && ok;
    ok = c.number(c.get(j, "r_out", path, true), P("r_out"), true) && ok;
    return ok ? static_cast<int>(ctr->size()) : -1;
  }
  c.add(P("type"), "must be one of ball, box, union, annulus");
  return -1;
}

void check_measure(Checker& c, const json& j, const std::string& path, int dim) {
  if (!j.is_array()) {
    c.add(path, "must be an array of terms (possibly empty)");
    return;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string tp = path + "[" + std::to_string(i) + "]";
    const json& t = j[i];
    auto P = [&](const std::string& k) { return Checker::join(tp, k); };
    const json* type = c.get(t, "type", tp, true);
    if (const json* w = c.get(t, "weight", tp, false)) c.number(w, P("weight"), true);
    if (!type) continue;
    std::string s = type->is_string() ? type->get<std::string>() : "";
    if (s == "power") {
      const json* a = c.get(t, "a", tp, true);
      if (c.number(a, P("a")) && a->get<double>() < 0.0) c.add(P("a"), "must be >= 0");
      c.vector(c.get(t, "pole", tp, true), P("pole"), dim);
    } else if (s == "boundary_power") {
      const json* a = c.get(t, "a", tp, true);
      if (c.number(a, P("a")) && a->get<double>() < 0.0) c.add(P("a"), "must be >= 0");
    } else if (s == "constant") {
      const json* l = c.get(t, "lambda", tp, true);
      if (c.number(l, P("lambda")) && l->get<double>() < 0.0) c.add(P("lambda"), "must be >= 0");
    } else if (s == "sphere") {
      c.vector(c.get(t, "center", tp, true), P("center"), dim);
      c.number(c.get(t, "radius", tp, true), P("radius"), true);
    } else if (s == "tabulated") {
      c.vector(c.get(t, "lo", tp, true), P("lo"), dim);
      c.vector(c.get(t, "hi", tp, true), P("hi"), dim);
      const json* shape = c.get(t, "shape", tp, true);
      const json* values = c.get(t, "values", tp, true);
      if (shape && values) {
        if (!shape->is_array() || static_cast<int>(shape->size()) != dim) {
          c.add(P("shape"), "must list one node count per axis");
        } else {
          std::size_t n = 1;
          for (const auto& s2 : *shape) n *= s2.is_number_integer() && s2.get<long>() >= 2 ? s2.get<std::size_t>() : 0;
          if (n == 0) c.add(P("shape"), "node counts must be integers >= 2");
          else if (!values->is_array() || values->size() != n) c.add(P("values"), "must hold prod(shape) numbers");
        }
      }
    } else {
      c.add(P("type"), "must be one of power, boundary_power, constant, sphere, tabulated");
    }
  }
}

void check_radii(Checker& c, const json& j, const std::string& path) {
  if (!j.is_object()) {
    c.add(path, "must be an object");
    return;
  }
  auto P = [&](const std::string& k) { return Checker::join(path, k); };
  c.number(c.get(j, "r_max", path, true), P("r_max"), true);
  c.number(c.get(j, "r_min", path, true), P("r_min"), true);
  c.integer(c.get(j, "count", path, true), P("count"), 2);
  if (const json* s = c.get(j, "spacing", path, false))
    if (!s->is_string() || (*s != "geometric" && *s != "linear")) c.add(P("spacing"), "must be geometric or linear");
}

model::RadiiSchedule radii_from(const json& j) {
  model::RadiiSchedule r;
  r.r_max = j.at("r_max").get<double>();
  r.r_min = j.at("r_min").get<double>();
  r.count = j.at("count").get<int>();
  r.spacing = j.value("spacing", std::string("geometric")) == "linear" ? model::Spacing::Linear : model::Spacing::Geometric;
  return r;
}

void prefix(std::vector<model::Violation>& out, const std::vector<model::Violation>& in, const std::string& p) {
  for (const auto& v : in) out.push_back({Checker::join(p, v.field), v.rule});
}

}  // namespace

const char* to_string(Kind k) {
  for (const auto& [kk, s] : kind_table())
    if (kk == k) return s.c_str();
  return "?";
}

std::optional<Kind> kind_from(const std::string& s) {
  for (const auto& [k, name] : kind_table())
    if (name == s) return k;
  return std::nullopt;
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, s] : kind_table()) v.push_back(s);
    return v;
  }();
  return names;
}

DomainSpec domain_from(const json& j) {
  std::string t = j.at("type").get<std::string>();
  if (t == "ball") return DomainSpec::ball(pt(j.at("center")), j.at("radius").get<double>());
  if (t == "box") return {Box{pt(j.at("lo")), pt(j.at("hi"))}};
  if (t == "union") {
    UnionOfBalls u;
    for (const auto& b : j.at("balls")) u.balls.push_back({pt(b.at("center")), b.at("radius").get<double>()});
    return {u};
  }
  if (t == "annulus") return {Annulus{pt(j.at("center")), j.at("r_in").get<double>(), j.at("r_out").get<double>()}};
  throw ConfigError("unknown domain type '" + t + "'");
}

model::OperatorSpec operator_from(const json& j) {
  DomainSpec d = domain_from(j.at("domain"));
  std::string kind = j.value("kind", std::string("laplacian"));
  if (kind == "laplacian") return model::OperatorSpec::laplacian(std::move(d));
  if (kind == "fractional") return model::OperatorSpec::fractional(j.at("alpha").get<double>(), std::move(d));
  throw ConfigError("unknown operator kind '" + kind + "'");
}

model::MeasureSpec measure_from(const json& j) {
  model::MeasureSpec nu;
  for (const auto& t : j) {
    std::string s = t.at("type").get<std::string>();
    double w = t.value("weight", 1.0);
    model::TermShape shape;
    if (s == "power") shape = model::DensityPower{t.at("a").get<double>(), pt(t.at("pole"))};
    else if (s == "boundary_power") shape = model::BoundaryPower{t.at("a").get<double>()};
    else if (s == "constant") shape = model::ConstantDensity{t.at("lambda").get<double>()};
    else if (s == "sphere") shape = model::SphereSurface{pt(t.at("center")), t.at("radius").get<double>()};
    else if (s == "tabulated")
      shape = model::TabulatedDensity{Box{pt(t.at("lo")), pt(t.at("hi"))}, t.at("shape").get<std::vector<int>>(),
                                      t.at("values").get<std::vector<double>>()};
    else throw ConfigError("unknown measure term '" + s + "'");
    nu.terms.push_back({std::move(shape), w});
  }
  return nu;
}

ParseResult parse(const json& doc) {
  ParseResult res;
  Checker c;
  if (!doc.is_object()) {
    c.add("", "config must be an object");
    res.violations = c.out;
    return res;
  }

  if (const json* v = c.get(doc, "schema_version", "", true))
    if (!v->is_number_integer() || v->get<int>() != kSchemaVersion)
      c.add("schema_version", "must equal " + std::to_string(kSchemaVersion));
  const json* seed = c.get(doc, "seed", "", true);
  if (seed && !seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0))
    c.add("seed", "must be a non-negative integer");
  if (const json* o = c.get(doc, "output_dir", "", false))
    if (!o->is_string() || o->get<std::string>().empty()) c.add("output_dir", "must be a non-empty string");

  std::optional<Kind> kind;
  if (const json* k = c.get(doc, "kind", "", true)) {
    if (k->is_string()) kind = kind_from(k->get<std::string>());
    if (!kind) {
      std::string opts;
      for (const auto& n : kind_names()) opts += (opts.empty() ? "" : ", ") + n;
      c.add("kind", "must be one of " + opts);
    }
  }

  const bool needs_model = !kind || (*kind != Kind::Capacity && *kind != Kind::ExitKernelCheck);
  const bool needs_candidate =
      kind && (*kind == Kind::FineLimit || *kind == Kind::WeakTest || *kind == Kind::Dichotomy || *kind == Kind::Fk ||
               *kind == Kind::Resolvent);
  const bool needs_points = kind && (*kind == Kind::Classify || *kind == Kind::FineLimit || *kind == Kind::Fk ||
                                     *kind == Kind::Resolvent || *kind == Kind::RevuzCheck);
  const bool monte_carlo = kind && (*kind == Kind::Fk || *kind == Kind::Resolvent || *kind == Kind::RevuzCheck);

  int dim = -1;
  bool op_ok = false;
  if (needs_model) {
    if (const json* op = c.get(doc, "operator", "", true)) {
      if (!op->is_object()) {
        c.add("operator", "must be an object");
      } else {
        std::size_t before = c.out.size();
        if (const json* k = c.get(*op, "kind", "operator", true))
          if (!k->is_string() || (*k != "laplacian" && *k != "fractional"))
            c.add("operator.kind", "must be laplacian or fractional");
        if (op->value("kind", json("")) == "fractional") c.number(c.get(*op, "alpha", "operator", true), "operator.alpha", true);
        if (const json* d = c.get(*op, "domain", "operator", true)) dim = check_domain(c, *d, "operator.domain");
        op_ok = c.out.size() == before && dim > 0;
      }
    }
    if (const json* m = c.get(doc, "measure", "", true)) check_measure(c, *m, "measure", dim);
  }
  if (needs_candidate) {
    if (const json* cand = c.get(doc, "candidate", "", true)) {
      if (!cand->is_string() || !catalog::exists(cand->get<std::string>()))
        c.add("candidate", "must name a catalog entry (see `smpkit catalog`)");
    }
    if (const json* a = c.get(doc, "candidate_args", "", false)) {
      if (!a->is_object()) c.add("candidate_args", "must be an object");
      else {
        if (const json* s = c.get(*a, "scale", "candidate_args", false)) c.number(s, "candidate_args.scale");
        if (const json* s = c.get(*a, "axis", "candidate_args", false)) c.integer(s, "candidate_args.axis", 0);
        if (const json* s = c.get(*a, "pole", "candidate_args", false)) c.vector(s, "candidate_args.pole", dim);
        if (const json* s = c.get(*a, "bump_center", "candidate_args", false))
          c.vector(s, "candidate_args.bump_center", dim);
        if (const json* s = c.get(*a, "bump_radius", "candidate_args", false))
          c.number(s, "candidate_args.bump_radius", true);
      }
    }
  }
  if (needs_points) {
    if (const json* p = c.get(doc, "points", "", true)) {
      if (!p->is_array() || p->empty()) c.add("points", "must be a non-empty array of points");
      else
        for (std::size_t i = 0; i < p->size(); ++i) c.vector(&(*p)[i], "points[" + std::to_string(i) + "]", dim);
    }
  }
  if (kind && (*kind == Kind::FineLimit || *kind == Kind::Dichotomy || *kind == Kind::Classify))
    if (const json* r = c.get(doc, "radii", "", *kind == Kind::FineLimit)) check_radii(c, *r, "radii");
  if (kind && *kind == Kind::Dichotomy) {
    if (const json* g = c.get(doc, "grid", "", true)) {
      c.integer(c.get(*g, "per_axis", "grid", true), "grid.per_axis", 2);
      if (const json* m = c.get(*g, "margin", "grid", false)) c.number(m, "grid.margin", true);
    }
    if (const json* z = c.get(doc, "zero_threshold", "", false)) c.number(z, "zero_threshold", true);
  }
  if (const json* f = c.get(doc, "fine_limit", "", false)) {
    if (const json* a = c.get(*f, "abs_tol", "fine_limit", false)) c.number(a, "fine_limit.abs_tol", true);
    if (const json* r = c.get(*f, "rel_tol", "fine_limit", false)) c.number(r, "fine_limit.rel_tol", true);
  }
  if (kind && (*kind == Kind::Dichotomy || *kind == Kind::WeakTest)) {
    if (const json* b = c.get(doc, "bumps", "", *kind == Kind::WeakTest)) {
      c.integer(c.get(*b, "per_axis", "bumps", true), "bumps.per_axis", 1);
      c.number(c.get(*b, "radius", "bumps", true), "bumps.radius", true);
    }
  }
  if (monte_carlo || (kind && *kind == Kind::ExitKernelCheck)) {
    if (const json* b = c.get(doc, "budgets", "", true)) {
      c.integer(c.get(*b, "replicates", "budgets", true), "budgets.replicates", 2);
      if (monte_carlo) {
        const json* dt = c.get(*b, "dt", "budgets", true);
        if (dt && (!dt->is_array() || dt->empty() ||
                   !std::all_of(dt->begin(), dt->end(), [](const json& x) { return x.is_number() && x.get<double>() > 0.0; })))
          c.add("budgets.dt", "must be a non-empty array of positive numbers");
      }
      if (const json* e = c.get(*b, "eps", "budgets", false)) c.number(e, "budgets.eps", true);
      if (const json* t = c.get(*b, "t", "budgets", kind && *kind == Kind::Fk)) c.number(t, "budgets.t", true);
      if (const json* q = c.get(*b, "ci_level", "budgets", false))
        if (c.number(q, "budgets.ci_level") && !(q->get<double>() > 0.0 && q->get<double>() < 1.0))
          c.add("budgets.ci_level", "must lie in (0, 1)");
    }
  } else if (const json* b = c.get(doc, "budgets", "", false)) {
    if (const json* q = c.get(*b, "quad_tol", "budgets", false)) c.number(q, "budgets.quad_tol", true);
  }
  if (kind && *kind == Kind::Capacity) {
    if (const json* cap = c.get(doc, "capacity", "", true)) {
      const json* n = c.get(*cap, "grid_n", "capacity", true);
      if (n && (!n->is_array() || n->empty() ||
                !std::all_of(n->begin(), n->end(), [](const json& x) { return x.is_number_integer() && x.get<int>() >= 1; })))
        c.add("capacity.grid_n", "must be a non-empty array of integers >= 1");
      c.number(c.get(*cap, "half", "capacity", true), "capacity.half", true);
      const json* dimj = c.get(*cap, "dim", "capacity", true);
      int cd = c.integer(dimj, "capacity.dim", 1) ? dimj->get<int>() : -1;
      const json* t = c.get(*cap, "target", "capacity", true);
      if (t && (!t->is_string() || (*t != "ball" && *t != "cell"))) c.add("capacity.target", "must be ball or cell");
      if (const json* ctr = c.get(*cap, "center", "capacity", false)) c.vector(ctr, "capacity.center", cd);
      if (t && *t == "ball") c.number(c.get(*cap, "radius", "capacity", true), "capacity.radius", true);
      if (const json* p = c.get(*cap, "p", "capacity", false))
        if (!p->is_array() || !std::all_of(p->begin(), p->end(), [](const json& x) { return x.is_number() && x.get<double>() >= 1.0; }))
          c.add("capacity.p", "must be an array of numbers >= 1");
      if (const json* a = c.get(*cap, "alpha", "capacity", false))
        if (c.number(a, "capacity.alpha", true) && cd > 0 && !(2.0 * a->get<double>() < cd))
          c.add("capacity.alpha", "2α < d required");
    }
  }
  if (kind && *kind == Kind::ExitKernelCheck) {
    if (const json* e = c.get(doc, "exit_kernel", "", false)) {
      if (const json* a = c.get(*e, "alphas", "exit_kernel", false))
        if (!a->is_array() || !std::all_of(a->begin(), a->end(), [](const json& x) {
              return x.is_number() && x.get<double>() > 0.0 && x.get<double>() < 1.0;
            }))
          c.add("exit_kernel.alphas", "must be numbers in (0, 1)");
      if (const json* dd = c.get(*e, "dims", "exit_kernel", false))
        if (!dd->is_array() || !std::all_of(dd->begin(), dd->end(), [](const json& x) { return x.is_number_integer() && x.get<int>() >= 1; }))
          c.add("exit_kernel.dims", "must be integers >= 1");
    }
  }

  // Semantic checks on the model once its structure is sound.
  ExperimentConfig cfg;
  if (needs_model && op_ok) {
    try {
      cfg.op = operator_from(doc.at("operator"));
      prefix(c.out, model::validate(cfg.op), "operator");
      if (doc.contains("measure") && doc.at("measure").is_array()) {
        std::size_t before = c.out.size();
        check_measure(c, doc.at("measure"), "measure", dim);
        bool fresh = c.out.size() == before;
        c.out.resize(before);
        if (fresh) {
          cfg.nu = measure_from(doc.at("measure"));
          prefix(c.out, model::validate(cfg.nu, cfg.op.domain), "measure");
        }
      }
      if (needs_points && doc.contains("points") && doc.at("points").is_array())
        for (std::size_t i = 0; i < doc.at("points").size(); ++i) {
          const json& p = doc.at("points")[i];
          if (p.is_array() && static_cast<int>(p.size()) == dim && !cfg.op.domain.contains(pt(p)))
            c.add("points[" + std::to_string(i) + "]", "must lie in D");
        }
    } catch (const std::exception& e) {
      c.add("operator", e.what());
    }
  }
  if (doc.contains("radii") && doc.at("radii").is_object()) {
    std::size_t before = c.out.size();
    check_radii(c, doc.at("radii"), "radii");
    bool fresh = c.out.size() == before;
    c.out.resize(before);
    if (fresh) prefix(c.out, model::validate(radii_from(doc.at("radii"))), "radii");
  }

  res.violations = c.out;
  if (!res.violations.empty()) return res;

  cfg.raw = doc;
  cfg.kind = *kind;
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.output_dir = doc.value("output_dir", std::string("out"));
  if (needs_candidate) {
    cfg.candidate = doc.at("candidate").get<std::string>();
    if (doc.contains("candidate_args")) {
      const json& a = doc.at("candidate_args");
      cfg.args.scale = a.value("scale", 1.0);
      cfg.args.axis = a.value("axis", 0);
      if (a.contains("pole")) cfg.args.pole = pt(a.at("pole"));
      if (a.contains("bump_center")) cfg.args.bump_center = pt(a.at("bump_center"));
      cfg.args.bump_radius = a.value("bump_radius", 0.3);
    }
  }
  if (doc.contains("points"))
    for (const auto& p : doc.at("points")) cfg.points.push_back(pt(p));
  if (doc.contains("radii")) cfg.radii = radii_from(doc.at("radii"));
  else cfg.radii = kind == Kind::Classify ? model::RadiiSchedule{0.5, 0.05, 4} : model::RadiiSchedule{1e-2, 1e-4, 8};
  if (doc.contains("grid")) {
    cfg.grid_per_axis = doc.at("grid").at("per_axis").get<int>();
    cfg.grid_margin = doc.at("grid").value("margin", 0.1);
  }
  if (doc.contains("bumps")) {
    cfg.bumps_per_axis = doc.at("bumps").at("per_axis").get<int>();
    cfg.bump_radius = doc.at("bumps").at("radius").get<double>();
  }
  cfg.zero_threshold = doc.value("zero_threshold", 1e-6);
  if (doc.contains("fine_limit")) {
    cfg.fine_abs_tol = doc.at("fine_limit").value("abs_tol", 1e-8);
    cfg.fine_rel_tol = doc.at("fine_limit").value("rel_tol", 1e-6);
  }
  if (doc.contains("budgets")) {
    const json& b = doc.at("budgets");
    cfg.budgets.replicates = b.value("replicates", std::size_t{10'000});
    if (b.contains("dt")) cfg.budgets.dt = b.at("dt").get<std::vector<double>>();
    cfg.budgets.eps = b.value("eps", 0.0);
    cfg.budgets.quad_tol = b.value("quad_tol", 1e-6);
    cfg.budgets.t = b.value("t", 0.1);
    cfg.budgets.ci_level = b.value("ci_level", 0.99);
  }
  if (doc.contains("capacity")) {
    const json& cj = doc.at("capacity");
    auto& cc = cfg.capacity;
    cc.grid_n = cj.at("grid_n").get<std::vector<int>>();
    cc.half = cj.at("half").get<double>();
    cc.dim = cj.at("dim").get<int>();
    int cd = cc.dim;
    cc.target = cj.at("target").get<std::string>();
    cc.center = cj.contains("center") ? pt(cj.at("center")) : Point::zero(cd);
    cc.radius = cj.value("radius", 0.5);
    if (cj.contains("p")) cc.p = cj.at("p").get<std::vector<double>>();
    cc.alpha = cj.value("alpha", 1.0);
    cc.dual = cj.value("dual", true);
  }
  if (doc.contains("exit_kernel")) {
    const json& e = doc.at("exit_kernel");
    auto& ek = cfg.exit_kernel;
    if (e.contains("dims")) ek.dims = e.at("dims").get<std::vector<int>>();
    if (e.contains("alphas")) ek.alphas = e.at("alphas").get<std::vector<double>>();
    ek.mc_dim = e.value("mc_dim", 2);
    ek.mc_alpha = e.value("mc_alpha", 0.5);
  }
  if (cfg.kind == Kind::ExitKernelCheck) cfg.exit_kernel.samples = cfg.budgets.replicates;
  res.config = std::move(cfg);
  return res;
}

ParseResult load(const std::string& path) {
  ParseResult res;
  std::ifstream in(path);
  if (!in) {
    res.violations.push_back({"<file>", "cannot open " + path});
    return res;
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    res.violations.push_back({"<file>", "not valid JSON: " + path});
    return res;
  }
  return parse(doc);
}

json experiment_content(const json& doc) {
  json c = doc;
  if (c.is_object()) c.erase("output_dir");
  return c;
}

std::string config_hash(const json& doc) {
  std::uint64_t h = task_id(experiment_content(doc).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace smpkit::config
