// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned below.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smpkit/capacity.hpp"
#include "smpkit/catalog.hpp"
#include "smpkit/errors.hpp"
#include "smpkit/feynman_kac.hpp"
#include "smpkit/harness.hpp"
#include "smpkit/maxprinciple.hpp"
#include "smpkit/parallel.hpp"
#include "smpkit/paths.hpp"

using namespace smpkit;
using harness::json;

namespace {

// Criterion 1
constexpr double kMassTol = 1e-3;
constexpr std::size_t kExitSamples = 100'000;
// Criterion 2
constexpr int kMeanValuePoints = 1000;
constexpr double kMeanValueTol = 1e-8;
constexpr double kFineResidualTol = 1e-8;
// Criterion 3
constexpr std::size_t kRevuzPaths = 100'000;
// Criteria 3, 4, 6, 7: z-score for "within" and for "CI excludes 0".
constexpr double kSigmas = 3.0;
// Criterion 4
constexpr std::size_t kResolventPaths = 10'000;
constexpr double kResolventDt = 2e-3;
constexpr double kSeriesTol = 1e-3;
constexpr double kIdentityTol = 1e-6;
// Criterion 5
constexpr double kWeakTol = 1e-6;
constexpr double kSignificance = 5.0;
// Criterion 6
constexpr std::size_t kPositivityPaths = 4000;
// Criterion 7
constexpr std::size_t kStablePaths = 100'000;
constexpr std::size_t kBrownianPaths = 10'000;
// Criterion 8: successive median increments may not fall below this fraction
// of the previous one (a convergent sequence would shrink them geometrically),
// and the last semigroup estimate must be below this fraction of the first.
constexpr double kIncrementRatio = 0.5;
constexpr double kSemigroupDrop = 0.1;
// Criterion 9
constexpr double kCapacityRelTol = 0.10;
constexpr double kSolverTol = 1e-6;

const double kResolventCentre = 1.0 - 1.0 / std::sinh(1.0);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json ball3() { return {{"type", "ball"}, {"center", {0, 0, 0}}, {"radius", 1}}; }
json laplacian() { return {{"kind", "laplacian"}, {"domain", ball3()}}; }
json power_measure(double a, double w) { return json::array({{{"type", "power"}, {"a", a}, {"pole", {0, 0, 0}}, {"weight", w}}}); }
json constant_measure(double l) { return json::array({{{"type", "constant"}, {"lambda", l}}}); }

harness::RunReport run_config(const json& doc, int workers = 0) {
  auto p = config::parse(doc);
  if (!p.config) {
    std::string msg = "invalid acceptance config:";
    for (const auto& v : p.violations) msg += " " + v.field + " (" + v.rule + ")";
    throw ConfigError(msg);
  }
  harness::RunOptions o;
  o.workers = workers;
  o.write_files = false;
  return harness::run(*p.config, o);
}

const json* verdict(const json& report, const std::string& subject) {
  for (const auto& v : report["verdicts"])
    if (v["subject"] == subject) return &v["verdict"];
  return nullptr;
}

bool verdict_is(const json& report, const std::string& subject, const std::string& value) {
  const json* v = verdict(report, subject);
  return v && *v == value;
}

std::vector<Point> random_points(std::size_t n, double radius, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> out;
  while (out.size() < n) {
    Point p{u(gen), u(gen), u(gen)};
    if (norm(p) < radius) out.push_back(p);
  }
  return out;
}

json points_json(const std::vector<Point>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p[0], p[1], p[2]});
  return a;
}

// 1. Exit-kernel normalization and the MC exit law.
Outcome exit_kernel() {
  Outcome o;
  json doc = {{"schema_version", 1},
              {"kind", "exit-kernel-check"},
              {"seed", 101},
              {"exit_kernel", {{"dims", {2, 3}}, {"alphas", {0.25, 0.5, 0.75}}, {"mc_dim", 2}, {"mc_alpha", 0.5}}},
              {"budgets", {{"replicates", kExitSamples}, {"dt", {1e-3}}}}};
  auto r = run_config(doc).report;
  for (const auto& m : r["outputs"]["masses"]) {
    double mass = m["normalized_mass"]["value"];
    std::string tag = "d=" + std::to_string(m["d"].get<int>()) + " a=" + fmt(m["alpha"]);
    o.require(std::abs(mass - 1.0) <= kMassTol, tag + " normalized mass " + fmt(mass));
    std::string dev = m["as_printed_mass"]["infinite"].get<bool>() ? "infinite" : fmt(m["as_printed_deviation"]);
    o.detail << tag << " as-printed deviation " << dev << "; ";
  }
  double ks = r["outputs"]["monte_carlo"]["ks_normalized"];
  o.require(ks <= 0.02, "KS(normalized) " + fmt(ks) + " <= 0.02");
  o.require(verdict_is(r, "mc/as_printed", "rejected"), "as-printed law rejected");
  return o;
}

// 2. Mean-value recovery and the fine limit of |x|^2 at 0.
Outcome mean_value() {
  Outcome o;
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> u(-0.5, 0.5), ur(0.01, 0.45);
  std::vector<std::pair<std::string, mp::Fn>> fixtures = {
      {"x1x2-2x3", [](const Point& y) { return y[0] * y[1] - 2.0 * y[2]; }},
      {"x1^2-x2^2", [](const Point& y) { return y[0] * y[0] - y[1] * y[1]; }},
      {"x1^3-3x1x2^2", [](const Point& y) { return y[0] * y[0] * y[0] - 3.0 * y[0] * y[1] * y[1]; }},
  };
  for (const auto& [name, f] : fixtures) {
    double worst = 0.0;
    for (int k = 0; k < kMeanValuePoints; ++k) {
      Point x{u(gen), u(gen), u(gen)};
      worst = std::max(worst, std::abs(mp::volume_average(f, x, ur(gen)).value - f(x)));
    }
    o.require(worst <= kMeanValueTol, name + " max error " + fmt(worst));
  }
  auto op = model::OperatorSpec::laplacian(DomainSpec::unit_ball(3));
  auto fl = mp::fine_limit([](const Point& y) { return norm2(y); }, Point::zero(3), op, {1e-2, 1e-4, 8});
  o.require(!fl.undecided && std::abs(fl.limit) <= kFineResidualTol, "fine limit " + fmt(fl.limit));
  o.require(fl.residual < kFineResidualTol, "residual " + fmt(fl.residual));
  return o;
}

// 3. Revuz duality: Euler PCAF means against quadrature potentials.
Outcome revuz() {
  Outcome o;
  struct Case {
    std::string name;
    json measure;
    double exact;
  };
  for (const Case& c : {Case{"V=1", constant_measure(1.0), 1.0 / 6.0}, Case{"V=1/|y|", power_measure(1.0, 1.0), 0.5}}) {
    json doc = {{"schema_version", 1}, {"kind", "revuz-check"}, {"seed", 303},
                {"operator", laplacian()}, {"measure", c.measure}, {"points", {{0, 0, 0}}},
                {"budgets", {{"replicates", kRevuzPaths}, {"dt", {1e-3, 2.5e-4}}, {"ci_level", 0.99}}}};
    auto r = run_config(doc).report;
    const json& row = r["outputs"]["revuz"][0];
    double oracle = row["oracle"]["value"]["value"];
    o.require(std::abs(oracle - c.exact) <= 1e-6, c.name + " oracle " + fmt(oracle));
    for (const auto& e : row["refinement"]) {
      double z = e["sigmas"];
      o.require(z <= kSigmas, c.name + " dt=" + fmt(e["dt"]) + " mean " + fmt(e["mean"]) + " (" + fmt(z) + " sigma)");
    }
    o.require(verdict_is(r, "points[0]/refinement", "shrinking"), c.name + " discrepancy shrinking");
  }
  return o;
}

// 4. Resolvent: Neumann series against Feynman-Kac.
Outcome resolvent() {
  Outcome o;
  auto pts = random_points(10, 0.9, 404);
  pts.insert(pts.begin(), Point::zero(3));
  for (double lambda : {0.5, 1.0}) {
    json doc = {{"schema_version", 1}, {"kind", "resolvent"}, {"seed", 404},
                {"operator", laplacian()}, {"measure", constant_measure(lambda)}, {"candidate", "constant-one"},
                {"points", points_json(pts)},
                {"budgets", {{"replicates", kResolventPaths}, {"dt", {kResolventDt}}, {"ci_level", 0.99}}}};
    auto r = run_config(doc).report;
    int agree = 0, total = 0;
    double worst_residual = 0.0;
    for (const auto& e : r["outputs"]["estimates"]) {
      double mc = e["mc"]["estimate"], se = e["mc"]["stderr"], series = e["series"]["value"];
      ++total;
      if (std::abs(mc - series) <= kSigmas * se) ++agree;
      worst_residual = std::max(worst_residual, e["series"]["identity_residual"].get<double>());
      if (lambda == 1.0 && e["point_index"] == 0) {
        o.require(std::abs(series - kResolventCentre) <= kSeriesTol, "centre series " + fmt(series));
        o.require(std::abs(mc - kResolventCentre) <= kSigmas * se, "centre MC " + fmt(mc) + " se " + fmt(se));
      }
    }
    o.require(agree == total, "lambda=" + fmt(lambda) + " agree " + std::to_string(agree) + "/" + std::to_string(total));
    o.require(worst_residual < kIdentityTol, "lambda=" + fmt(lambda) + " identity residual " + fmt(worst_residual));
  }
  return o;
}

// 5. The catalog example u = |x|^2 with ν = 6|y|^-2 dy.
Outcome worked_example() {
  Outcome o;
  json base = {{"schema_version", 1}, {"seed", 505}, {"operator", laplacian()}, {"measure", power_measure(2.0, 6.0)},
               {"candidate", "paper-example-x2"}};
  json weak = base;
  weak["kind"] = "weak-test";
  weak["bumps"] = {{"per_axis", 3}, {"radius", 0.3}};
  auto w = run_config(weak).report;
  double worst = 0.0;
  for (const auto& b : w["outputs"]["weak_test"]["bumps"]) worst = std::max(worst, std::abs(b["value"].get<double>()));
  o.require(worst <= kWeakTol, "max |weak value| " + fmt(worst));

  json cls = base;
  cls.erase("candidate");
  cls["kind"] = "classify";
  cls["points"] = {{0, 0, 0}};
  auto c = run_config(cls).report;
  const json& fit = c["outputs"]["classifications"][0]["table"]["fit"];
  double b = fit["b"], se = fit["b_stderr"];
  o.require(verdict_is(c, "points[0]", "InN"), "classify(0) = " + verdict(c, "points[0]")->get<std::string>());
  o.require(b > kSignificance * se, "log coefficient " + fmt(b) + " +- " + fmt(se));

  json dich = base;
  dich["kind"] = "dichotomy";
  dich["grid"] = {{"per_axis", 5}, {"margin", 0.1}};
  auto d = run_config(dich).report;
  const json& out = d["outputs"]["dichotomy"];
  bool z_is_origin = out["zero_set"].size() == 1 && norm(Point{out["grid"][out["zero_set"][0].get<std::size_t>()]["x"]
                                                                   .get<std::vector<double>>()}) == 0.0;
  o.require(out["verdict"] == "Consistent", "dichotomy " + out["verdict"].get<std::string>());
  o.require(z_is_origin, "Z = {0}");
  return o;
}

// 6. Strict positivity for bounded ν.
Outcome positivity() {
  Outcome o;
  auto D = DomainSpec::unit_ball(3);
  auto op = model::OperatorSpec::laplacian(D);
  auto nu = model::MeasureSpec::constant(1.0);
  auto bump = kernels::TestBump::make(Point::zero(3), 0.3);
  auto pts = random_points(20, 0.9, 606);
  int excluded = 0;
  double min_z = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    fk::FkOptions fo;
    fo.n = kPositivityPaths;
    fo.dt = 1e-3;
    fo.seed = 606;
    fo.task = "positivity/" + std::to_string(i);
    auto e = fk::fk_resolvent(pts[i], [&](const Point& y) { return bump(y); }, nu, op, fo);
    double z = e.stderr_ > 0.0 ? e.estimate / e.stderr_ : 0.0;
    min_z = std::min(min_z, z);
    if (z > kSigmas) ++excluded;
  }
  o.require(excluded == static_cast<int>(pts.size()),
            "CI excludes 0 at " + std::to_string(excluded) + "/20 points (min z " + fmt(min_z) + ")");
  auto cand = catalog::make("resolvent-bump", {}, op, nu);
  auto rep = mp::dichotomy_check(cand, nu, op, mp::grid_points(D, 5, 0.1));
  o.require(rep.verdict == mp::DichotomyVerdict::Consistent, std::string("dichotomy ") + mp::to_string(rep.verdict));
  o.require(rep.zero_set.empty(), "Z empty (" + std::to_string(rep.zero_set.size()) + " zeros)");
  return o;
}

// 7. Two disjoint balls: the stable walk reaches the second one, Brownian motion cannot.
Outcome irreducibility() {
  Outcome o;
  DomainSpec two{UnionOfBalls{{Ball{Point{-1.5, 0.0, 0.0}, 1.0}, Ball{Point{1.5, 0.0, 0.0}, 1.0}}}};
  Point x{-1.5, 0.0, 0.0};
  auto st = paths::replicate(kStablePaths, 707, task_id("stable"),
                             [&](std::size_t, RngStream& rng) { return paths::stable_wos_exit(two, x, 0.5, rng).sojourn[1]; });
  auto s = paths::summarize(st);
  o.require(s.mean > kSigmas * s.stderr_, "stable residence " + fmt(s.mean) + " +- " + fmt(s.stderr_));
  auto br = paths::replicate(kBrownianPaths, 707, task_id("brownian"), [&](std::size_t, RngStream& rng) {
    return paths::brownian_wos_sojourn(two, x, 1e-4, rng).sojourn[1];
  });
  double reached = 0.0;
  for (double v : br) reached = std::max(reached, v);
  o.require(reached == 0.0, "Brownian residence max " + fmt(reached));
  return o;
}

// 8. Divergence of the PCAF at a point of N_ν.
Outcome divergence() {
  Outcome o;
  auto D = DomainSpec::unit_ball(3);
  auto op = model::OperatorSpec::laplacian(D);
  auto nu = model::MeasureSpec::power(2.0, Point::zero(3), 6.0);
  std::vector<double> med, fkv;
  for (double dt : {1e-2, 1e-3, 1e-4}) {
    std::size_t n = dt < 5e-4 ? 4000 : 20000;
    auto v = paths::replicate(n, 808, task_id("divergence"), [&](std::size_t, RngStream& rng) {
      return paths::euler_killed_pcaf(D, Point::zero(3), nu, dt, rng).pcaf;
    });
    med.push_back(paths::median(v));
    fk::FkOptions fo;
    fo.n = n;
    fo.dt = dt;
    fo.seed = 808;
    fkv.push_back(fk::fk_semigroup(Point::zero(3), 0.1, [](const Point&) { return 1.0; }, nu, op, fo).estimate);
    o.detail << "dt=" << fmt(dt) << " median A " << fmt(med.back()) << " semigroup " << fmt(fkv.back()) << "; ";
  }
  double inc1 = med[1] - med[0], inc2 = med[2] - med[1];
  o.require(inc1 > 0.0 && inc2 > 0.0, "median increasing");
  o.require(inc2 >= kIncrementRatio * inc1, "no stabilization (increments " + fmt(inc1) + ", " + fmt(inc2) + ")");
  o.require(fkv[1] < fkv[0] && fkv[2] < fkv[1] && fkv[2] <= kSemigroupDrop * fkv[0], "semigroup decreasing toward 0");
  return o;
}

// 9. Capacities.
Outcome capacities() {
  using namespace capacity;
  Outcome o;
  const Point O = Point::zero(3);
  auto fine = Grid::cube(3, 41, 1.025);
  auto ball = CapacityProblem::riesz(fine, fine.cells_in_ball(O, 0.5));
  auto c1 = solve_c1(ball);
  auto d1 = solve_dual_c1(ball);
  o.require(c1.converged && std::abs(c1.value - 0.5) <= kCapacityRelTol * 0.5, "41^3 ball C1 " + fmt(c1.value) + " vs r = 0.5");
  bool weak = d1.value <= c1.value * (1.0 + kSolverTol);

  auto g = Grid::cube(3, 21, 1.025);
  auto solve = [&](std::vector<std::size_t> cells) {
    auto pr = CapacityProblem::riesz(g, std::move(cells));
    auto a = solve_c1(pr), b = solve_dual_c1(pr);
    weak = weak && b.value <= a.value * (1.0 + kSolverTol);
    return a.value;
  };
  auto small = g.cells_in_ball(O, 0.3), big = g.cells_in_ball(O, 0.5);
  auto left = g.cells_in_ball(Point{-0.25, 0.0, 0.0}, 0.3), right = g.cells_in_ball(Point{0.25, 0.0, 0.0}, 0.3);
  std::set<std::size_t> u(left.begin(), left.end());
  u.insert(right.begin(), right.end());
  double cs = solve(small), cb = solve(big), cl = solve(left), cr = solve(right), cu = solve({u.begin(), u.end()});
  o.require(cs <= cb * (1.0 + kSolverTol), "monotone " + fmt(cs) + " <= " + fmt(cb));
  o.require(cl <= cu * (1.0 + kSolverTol) && cr <= cu * (1.0 + kSolverTol), "monotone in union");
  o.require(cu <= (cl + cr) * (1.0 + kSolverTol), "subadditive " + fmt(cu) + " <= " + fmt(cl + cr));

  std::vector<double> single, hs;
  for (int n : {5, 11, 21, 41}) {
    auto gc = Grid::cube(3, n, 1.025);
    auto pr = CapacityProblem::riesz(gc, {gc.cell_of(O)});
    auto a = solve_c1(pr), b = solve_dual_c1(pr);
    weak = weak && b.value <= a.value * (1.0 + kSolverTol);
    single.push_back(a.value);
    hs.push_back(gc.h);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < single.size(); ++i) decreasing = decreasing && single[i] < single[i - 1];
  // Linear decay in h: C1 of a cell is its equal-volume radius over 1.2.
  double rate = (single.back() / single.front()) / (hs.back() / hs.front());
  o.require(decreasing && rate <= 1.0 + kCapacityRelTol,
            "single cell " + fmt(single.front()) + " -> " + fmt(single.back()) + " (rate/h " + fmt(rate) + ")");
  o.require(weak, "c1 <= C1 on all fixtures");
  return o;
}

// 10. Reports are identical across worker counts outside the timing block.
Outcome determinism() {
  Outcome o;
  std::vector<json> docs = {
      {{"schema_version", 1}, {"kind", "fk"}, {"seed", 1001}, {"operator", laplacian()},
       {"measure", power_measure(1.0, 1.0)}, {"candidate", "constant-one"}, {"points", {{0, 0, 0}, {0.4, 0.1, 0}}},
       {"budgets", {{"replicates", 4000}, {"dt", {4e-3, 1e-3}}, {"t", 0.1}}}},
      {{"schema_version", 1}, {"kind", "revuz-check"}, {"seed", 1002}, {"operator", laplacian()},
       {"measure", power_measure(1.0, 1.0)}, {"points", {{0.3, 0, 0}}},
       {"budgets", {{"replicates", 4000}, {"dt", {4e-3}}}}},
      {{"schema_version", 1}, {"kind", "resolvent"}, {"seed", 1003}, {"operator", laplacian()},
       {"measure", constant_measure(1.0)}, {"candidate", "constant-one"}, {"points", {{0, 0, 0}}},
       {"budgets", {{"replicates", 4000}, {"dt", {4e-3}}}}},
      {{"schema_version", 1}, {"kind", "exit-kernel-check"}, {"seed", 1004},
       {"budgets", {{"replicates", 20000}, {"dt", {1e-3}}}}},
      {{"schema_version", 1}, {"kind", "dichotomy"}, {"seed", 1005}, {"operator", laplacian()},
       {"measure", power_measure(2.0, 6.0)}, {"candidate", "paper-example-x2"}, {"grid", {{"per_axis", 5}}}},
  };
  for (const auto& doc : docs) {
    auto a = harness::strip_timing(run_config(doc, 1).report).dump();
    auto b = harness::strip_timing(run_config(doc, 3).report).dump();
    o.require(a == b, doc["kind"].get<std::string>() + " identical across 1 and 3 workers");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smpkit acceptance suite"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria (1-10)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exit-kernel normalization", exit_kernel}, {"mean-value recovery", mean_value},
      {"Revuz duality", revuz},                   {"resolvent consistency", resolvent},
      {"example end-to-end", worked_example},      {"strict positivity", positivity},
      {"nonlocal irreducibility", irreducibility}, {"divergence on N_nu", divergence},
      {"capacity suite", capacities},             {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
