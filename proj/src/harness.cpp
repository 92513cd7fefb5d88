#include "smpkit/harness.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "smpkit/capacity.hpp"
#include "smpkit/catalog.hpp"
#include "smpkit/errors.hpp"
#include "smpkit/feynman_kac.hpp"
#include "smpkit/json_io.hpp"
#include "smpkit/kernels.hpp"
#include "smpkit/maxprinciple.hpp"
#include "smpkit/parallel.hpp"
#include "smpkit/paths.hpp"
#include "smpkit/potentials.hpp"
#include "smpkit/rng.hpp"

#ifndef SMPKIT_VERSION
#define SMPKIT_VERSION "0.0.0"
#endif

namespace smpkit::harness {

namespace {

using config::ExperimentConfig;
using config::Kind;
using io::number;
using io::point;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Verdicts and per-phase timings collected while a run progresses.
struct Context {
  const ExperimentConfig& cfg;
  json verdicts = json::array();
  json phases = json::object();
  bool undecided = false;

  void verdict(const std::string& subject, const std::string& v, const std::string& reason = "") {
    json j = {{"subject", subject}, {"verdict", v}};
    if (!reason.empty()) j["reason"] = reason;
    verdicts.push_back(j);
    if (v == "Undecided") undecided = true;
  }

  template <class F>
  auto timed(const std::string& phase, F&& f) {
    auto t0 = Clock::now();
    auto out = f();
    phases[phase] = phases.value(phase, 0.0) + seconds_since(t0);
    return out;
  }
};

std::string subject(std::size_t i) { return "points[" + std::to_string(i) + "]"; }

mp::Candidate candidate(const ExperimentConfig& cfg) { return catalog::make(cfg.candidate, cfg.args, cfg.op, cfg.nu); }

mp::FineLimitOptions fine_options(const ExperimentConfig& cfg) {
  mp::FineLimitOptions o;
  o.abs_tol = cfg.fine_abs_tol;
  o.rel_tol = cfg.fine_rel_tol;
  return o;
}

// ---------------------------------------------------------------- kinds

json run_classify(Context& ctx) {
  const auto& cfg = ctx.cfg;
  json out = json::array();
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    auto rep = ctx.timed("classify", [&] { return mp::classify_point(cfg.points[i], cfg.nu, cfg.op, cfg.radii); });
    ctx.verdict(subject(i), mp::to_string(rep.verdict), rep.reason);
    out.push_back(io::to_json(rep));
  }
  return {{"classifications", out}};
}

json run_fine_limit(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto cand = candidate(cfg);
  std::vector<mp::FineLimitResult> res(cfg.points.size());
  ctx.timed("fine_limit", [&] {
    parallel_for(res.size(), [&](std::size_t i) { res[i] = mp::fine_limit(cand.u, cfg.points[i], cfg.op, cfg.radii, fine_options(cfg)); });
    return 0;
  });
  json out = json::array();
  for (std::size_t i = 0; i < res.size(); ++i) {
    ctx.verdict(subject(i), res[i].undecided ? "Undecided" : "Decided");
    out.push_back(io::to_json(res[i]));
  }
  return {{"candidate", cand.name}, {"fine_limits", out}};
}

mp::WeakTestOptions weak_options(const ExperimentConfig& cfg, const mp::Candidate& cand) {
  mp::WeakTestOptions o;
  o.tol = cfg.budgets.quad_tol;
  o.u_singular = cand.singular;
  return o;
}

json run_weak_test(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto cand = candidate(cfg);
  auto bumps = mp::bump_family(cfg.op.domain, cfg.bumps_per_axis, cfg.bump_radius, true);
  auto s = ctx.timed("weak_test", [&] { return mp::weak_supersolution_test(cand.u, cfg.nu, cfg.op, bumps, weak_options(cfg, cand)); });
  ctx.verdict("weak_test", s.pass ? "pass" : "fail");
  return {{"candidate", cand.name}, {"weak_test", io::to_json(s)}};
}

json run_dichotomy(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto cand = candidate(cfg);
  mp::DichotomyOptions o;
  o.zero_threshold = cfg.zero_threshold;
  o.radii = cfg.radii;
  o.fine = fine_options(cfg);
  o.weak = weak_options(cfg, cand);
  o.weak.u_singular.clear();  // dichotomy_check adds the candidate's own singular points
  o.bumps_per_axis = cfg.bumps_per_axis;
  o.bump_radius = cfg.bump_radius;
  auto grid = mp::grid_points(cfg.op.domain, cfg.grid_per_axis, cfg.grid_margin);
  auto rep = ctx.timed("dichotomy", [&] { return mp::dichotomy_check(cand, cfg.nu, cfg.op, grid, o); });
  ctx.verdict("dichotomy", mp::to_string(rep.verdict), rep.reason);
  return {{"dichotomy", io::to_json(rep)}};
}

fk::FkOptions fk_options(const ExperimentConfig& cfg, double dt, const std::string& task) {
  fk::FkOptions o;
  o.n = cfg.budgets.replicates;
  o.dt = dt;
  o.eps = cfg.budgets.eps;
  o.seed = cfg.seed;
  o.task = task;
  o.ci_level = cfg.budgets.ci_level;
  return o;
}

json run_fk(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto cand = candidate(cfg);
  json out = json::array();
  for (std::size_t i = 0; i < cfg.points.size(); ++i)
    for (std::size_t j = 0; j < cfg.budgets.dt.size(); ++j) {
      double dt = cfg.budgets.dt[j];
      auto task = "fk/" + std::to_string(i) + "/" + std::to_string(j);
      auto e = ctx.timed("fk", [&] { return fk::fk_semigroup(cfg.points[i], cfg.budgets.t, cand.u, cfg.nu, cfg.op, fk_options(cfg, dt, task)); });
      json r = io::to_json(e);
      r["point_index"] = i;
      out.push_back(r);
    }
  return {{"candidate", cand.name}, {"t", cfg.budgets.t}, {"estimates", out}};
}

json run_resolvent(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto cand = candidate(cfg);
  std::optional<potentials::NeumannResolvent> series;
  std::string series_note;
  try {
    series.emplace(cfg.op, cfg.nu);
  } catch (const Error& e) {
    series_note = e.what();
  }
  json out = json::array();
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const Point& x = cfg.points[i];
    json s = nullptr;
    potentials::NeumannResult nr;
    if (series) {
      nr = ctx.timed("series", [&] { return series->apply(cand.u, x); });
      double resid = ctx.timed("series", [&] { return series->identity_residual(cand.u, x); });
      s = io::to_json(nr);
      s["identity_residual"] = number(resid);
    }
    for (std::size_t j = 0; j < cfg.budgets.dt.size(); ++j) {
      double dt = cfg.budgets.dt[j];
      auto task = "resolvent/" + std::to_string(i) + "/" + std::to_string(j);
      auto e = ctx.timed("fk", [&] { return fk::fk_resolvent(x, cand.u, cfg.nu, cfg.op, fk_options(cfg, dt, task)); });
      json r = {{"point_index", i}, {"mc", io::to_json(e)}, {"series", s}};
      if (series) {
        double gap = std::abs(e.estimate - nr.value);
        double allow = 3.0 * e.stderr_ + 0.5 * (nr.upper - nr.lower);
        r["gap"] = number(gap);
        r["allowance"] = number(allow);
        ctx.verdict(subject(i) + "/dt=" + number(dt).dump(), gap <= allow ? "agree" : "disagree");
      }
      out.push_back(r);
    }
  }
  json res = {{"candidate", cand.name}, {"estimates", out}};
  if (!series) res["series_unavailable"] = series_note;
  return res;
}

/// A_τ replicates for the measure: density terms by Euler, a single surface term by the shell estimator.
std::vector<double> pcaf_samples(const ExperimentConfig& cfg, const Point& x, double dt, std::uint64_t task) {
  const bool density = cfg.nu.has_density();
  const auto surfaces = cfg.nu.surfaces();
  if (density && !surfaces.empty())
    throw ConfigError("revuz-check: mixed density and surface measures are not supported");
  if (surfaces.size() > 1) throw ConfigError("revuz-check: at most one surface term");
  if (!surfaces.empty() && !(cfg.budgets.eps > 0.0)) throw ConfigError("revuz-check: surface measures need budgets.eps > 0");
  return paths::replicate(cfg.budgets.replicates, cfg.seed, task, [&](std::size_t, RngStream& rng) {
    paths::PathRecord rec = surfaces.empty()
                                ? paths::euler_killed_pcaf(cfg.op.domain, x, cfg.nu, dt, rng)
                                : paths::surface_pcaf(cfg.op.domain, x, surfaces[0].first, surfaces[0].second, dt,
                                                      cfg.budgets.eps, rng);
    return rec.pcaf_infinite ? std::numeric_limits<double>::infinity() : rec.pcaf;
  });
}

json run_revuz(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.op.brownian()) throw ConfigError("revuz-check: Euler PCAF paths need the laplacian operator");
  const double z = fk::normal_quantile_two_sided(cfg.budgets.ci_level);
  json out = json::array();
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const Point& x = cfg.points[i];
    potentials::PotentialOptions po;
    po.tol = cfg.budgets.quad_tol;
    auto oracle = ctx.timed("oracle", [&] { return potentials::potential(cfg.nu, cfg.op, x, po); });
    json rows = json::array();
    double first_gap = 0.0;
    for (std::size_t j = 0; j < cfg.budgets.dt.size(); ++j) {
      double dt = cfg.budgets.dt[j];
      auto task = task_id("revuz/" + std::to_string(i) + "/" + std::to_string(j));
      auto v = ctx.timed("paths", [&] { return pcaf_samples(cfg, x, dt, task); });
      std::size_t infinite = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double a) { return std::isinf(a); }));
      auto s = paths::summarize(v);
      json row = {{"dt", dt},
                  {"mean", number(s.mean)},
                  {"stderr", number(s.stderr_)},
                  {"n", s.n},
                  {"median", number(paths::median(v))},
                  {"infinite_fraction", static_cast<double>(infinite) / static_cast<double>(v.size())},
                  {"ci", {number(s.mean - z * s.stderr_), number(s.mean + z * s.stderr_)}}};
      if (!oracle.value.infinite && infinite == 0) {
        double gap = std::abs(s.mean - oracle.value.value);
        row["gap"] = gap;
        row["sigmas"] = number(gap / s.stderr_);
        bool match = gap <= 3.0 * s.stderr_;
        row["match_3sigma"] = match;
        ctx.verdict(subject(i) + "/dt=" + number(dt).dump(), match ? "match" : "mismatch");
        if (j == 0) first_gap = gap;
        if (j + 1 == cfg.budgets.dt.size() && j > 0) {
          bool shrinking = gap <= first_gap || gap <= 3.0 * s.stderr_;
          ctx.verdict(subject(i) + "/refinement", shrinking ? "shrinking" : "not-shrinking");
        }
      }
      rows.push_back(row);
    }
    out.push_back({{"point", point(x)}, {"oracle", io::to_json(oracle)}, {"refinement", rows}});
  }
  return {{"revuz", out}};
}

json run_capacity(Context& ctx) {
  const auto& cc = ctx.cfg.capacity;
  json out = json::array();
  for (int n : cc.grid_n) {
    auto grid = capacity::Grid::cube(cc.dim, n, cc.half);
    std::vector<std::size_t> target =
        cc.target == "ball" ? grid.cells_in_ball(cc.center, cc.radius) : std::vector<std::size_t>{grid.cell_of(cc.center)};
    if (target.empty()) throw ConfigError("capacity: the target contains no cell centre at n = " + std::to_string(n));
    for (double p : cc.p) {
      auto prob = capacity::CapacityProblem::riesz(grid, target, cc.alpha, p);
      json row = {{"n", n}, {"h", grid.h}, {"p", p}, {"target_cells", target.size()}};
      auto tag = "n=" + std::to_string(n) + "/p=" + io::number(p).dump();
      if (p == 1.0) {
        auto primal = ctx.timed("C1", [&] { return capacity::solve_c1(prob); });
        row["primal"] = io::to_json(primal);
        ctx.verdict(tag + "/C1", primal.converged ? "converged" : "not-converged");
        if (cc.dual) {
          auto dual = ctx.timed("c1", [&] { return capacity::solve_dual_c1(prob); });
          row["dual"] = io::to_json(dual);
          // c1 <= C1 up to both solvers' relative gaps.
          double slack = (primal.duality_gap + dual.duality_gap) * std::max(primal.value, dual.value) + 1e-12;
          bool weak = dual.value <= primal.value + slack;
          row["weak_duality"] = weak;
          ctx.verdict(tag + "/c1<=C1", weak ? "holds" : "violated");
        }
      } else {
        auto sol = ctx.timed("Cp", [&] { return capacity::solve_cp(prob); });
        row["primal"] = io::to_json(sol);
        ctx.verdict(tag + "/Cp", sol.converged ? "converged" : "not-converged");
      }
      out.push_back(row);
    }
  }
  return {{"target", cc.target}, {"center", point(cc.center)}, {"radius", cc.radius}, {"alpha", cc.alpha},
          {"dim", cc.dim}, {"half", cc.half}, {"capacities", out}};
}

/// Upper bound on sup |F_n - F| using F at every `stride`-th order statistic;
/// monotonicity of both functions bounds the gap between checkpoints.
double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf, std::size_t stride) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t prev = 0;
  double f_prev = 0.0;
  for (std::size_t k = 0;; k += stride) {
    std::size_t idx = std::min(k, sorted.size() - 1);
    double f = cdf(sorted[idx]);
    // On [x_prev, x_idx): F_n ranges over [prev/n, idx/n], F over [f_prev, f].
    d = std::max({d, static_cast<double>(idx) / n - f_prev, f - static_cast<double>(prev) / n,
                  std::abs(static_cast<double>(idx + 1) / n - f)});
    prev = idx + 1;
    f_prev = f;
    if (idx + 1 == sorted.size()) break;
  }
  return d;
}

json run_exit_kernel(Context& ctx) {
  const auto& ek = ctx.cfg.exit_kernel;
  json masses = json::array();
  for (int d : ek.dims)
    for (double a : ek.alphas) {
      kernels::ExitKernel kn(d, a, 1.0, kernels::ExitVariant::Normalized);
      kernels::ExitKernel kp(d, a, 1.0, kernels::ExitVariant::AsPrinted);
      auto m = kn.total_mass();
      auto mp_ = kp.total_mass();
      json row = {{"d", d},
                  {"alpha", a},
                  {"normalized_mass", io::extended(m)},
                  {"normalized_constant", kn.constant()},
                  {"analytic_constant", kernels::ExitKernel::analytic_constant(d, a)},
                  {"as_exponent_one_constant", kernels::ExitKernel::exponent_one_constant(d, a)},
                  {"as_printed_mass", io::extended(mp_)},
                  {"as_printed_deviation", mp_.infinite ? json(nullptr) : number(mp_.value - 1.0)}};
      masses.push_back(row);
      bool ok = !m.infinite && std::abs(m.value - 1.0) <= 1e-3;
      ctx.verdict("mass/d=" + std::to_string(d) + "/alpha=" + number(a).dump(), ok ? "normalized" : "off");
    }

  const int d = ek.mc_dim;
  const double a = ek.mc_alpha;
  auto rho = ctx.timed("sampling", [&] {
    return paths::replicate(ek.samples, ctx.cfg.seed, task_id("exit-kernel"), [&](std::size_t, RngStream& rng) {
      return norm(paths::stable_exit_step(Point::zero(d), 1.0, a, rng));
    });
  });
  std::sort(rho.begin(), rho.end());
  const std::size_t stride = std::max<std::size_t>(1, rho.size() / 2000);
  kernels::ExitKernel kn(d, a, 1.0, kernels::ExitVariant::Normalized);
  kernels::ExitKernel kp(d, a, 1.0, kernels::ExitVariant::AsPrinted);
  double ks_n = ctx.timed("ks", [&] {
    return ks_distance(rho, [&](double r) { return 1.0 - kn.tail_mass(r).value; }, stride);
  });
  json mc = {{"d", d}, {"alpha", a}, {"samples", rho.size()}, {"checkpoint_stride", stride}, {"ks_normalized", ks_n}};
  ctx.verdict("mc/normalized", ks_n <= 0.02 ? "match" : "mismatch");
  auto pm = kp.total_mass();
  if (pm.infinite) {
    mc["ks_as_printed"] = nullptr;
    ctx.verdict("mc/as_printed", "rejected", "infinite total mass, not a probability law");
  } else {
    double ks_p = ks_distance(rho, [&](double r) { return pm.value - kp.tail_mass(r).value; }, stride);
    mc["ks_as_printed"] = ks_p;
    ctx.verdict("mc/as_printed", ks_p > 0.02 ? "rejected" : "not-rejected");
  }
  json quantiles = json::array();
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    std::size_t k = static_cast<std::size_t>(q * static_cast<double>(rho.size() - 1));
    quantiles.push_back({{"q", q}, {"rho", rho[k]}, {"cdf", 1.0 - kn.tail_mass(rho[k]).value}});
  }
  mc["quantiles"] = quantiles;
  return {{"masses", masses}, {"monte_carlo", mc}};
}

json versions() {
  std::ostringstream eigen, boost;
  eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  boost << BOOST_VERSION / 100000 << "." << BOOST_VERSION / 100 % 1000 << "." << BOOST_VERSION % 100;
  std::ostringstream js;
  js << NLOHMANN_JSON_VERSION_MAJOR << "." << NLOHMANN_JSON_VERSION_MINOR << "." << NLOHMANN_JSON_VERSION_PATCH;
  return {{"smpkit", version()},
          {"eigen", eigen.str()},
          {"boost", boost.str()},
          {"nlohmann_json", js.str()},
#if defined(__VERSION__)
          {"compiler", __VERSION__}
#else
          {"compiler", "unknown"}
#endif
  };
}

// ---------------------------------------------------------------- plot data

std::string csv_header(const json& report, const std::string& columns) {
  return "# config_hash: " + report.value("config_hash", std::string("unknown")) + "\n" + columns + "\n";
}

std::string fmt(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

const json& outputs_of(const json& report, const std::string& key, const std::string& what) {
  const json& out = report.at("outputs");
  if (!out.contains(key))
    throw ConfigError("plotdata: report of kind '" + report.value("kind", std::string("?")) + "' has no " + what +
                      " data");
  return out.at(key);
}

std::string plot_fine_limit(const json& r) {
  std::string s = csv_header(r, "point,r,average,extrapolated");
  const json& fl = outputs_of(r, "fine_limits", "fine-limit");
  for (std::size_t i = 0; i < fl.size(); ++i)
    for (std::size_t k = 0; k < fl[i]["radii"].size(); ++k)
      s += std::to_string(i) + "," + fmt(fl[i]["radii"][k]) + "," + fmt(fl[i]["averages"][k]) + "," +
           fmt(fl[i]["limit"]) + "\n";
  return s;
}

std::string plot_classify(const json& r) {
  std::string s = csv_header(r, "point,delta,J,fit_a,fit_b,fit_c");
  const json& cl = outputs_of(r, "classifications", "classify");
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const json& t = cl[i]["table"];
    for (std::size_t k = 0; k < t["deltas"].size(); ++k)
      s += std::to_string(i) + "," + fmt(t["deltas"][k]) + "," + fmt(t["J"][k]) + "," + fmt(t["fit"]["a"]) + "," +
           fmt(t["fit"]["b"]) + "," + fmt(t["fit"]["c"]) + "\n";
  }
  return s;
}

std::string plot_capacity(const json& r) {
  std::string s = csv_header(r, "h,n,p,value,dual_value");
  for (const auto& row : outputs_of(r, "capacities", "capacity")) {
    json dual = row.contains("dual") ? row["dual"]["value"] : row["primal"]["dual_value"];
    s += fmt(row["h"]) + "," + fmt(row["n"]) + "," + fmt(row["p"]) + "," + fmt(row["primal"]["value"]) + "," +
         fmt(dual) + "\n";
  }
  return s;
}

std::string plot_fk(const json& r) {
  std::string s = csv_header(r, "point,dt,estimate,stderr,lo,hi");
  for (const auto& e : outputs_of(r, "estimates", "fk")) {
    const json& m = e.contains("mc") ? e["mc"] : e;
    s += fmt(e["point_index"]) + "," + fmt(m["dt"]) + "," + fmt(m["estimate"]) + "," + fmt(m["stderr"]) + "," +
         fmt(m["ci"][0]) + "," + fmt(m["ci"][1]) + "\n";
  }
  return s;
}

std::string plot_resolvent(const json& r) {
  std::string s = csv_header(r, "point,dt,mc,stderr,series,identity_residual");
  const json& est = outputs_of(r, "estimates", "resolvent");
  if (!est.empty() && !est[0].contains("mc"))
    throw ConfigError("plotdata: report of kind '" + r.value("kind", std::string("?")) + "' has no resolvent data");
  for (const auto& e : est) {
    json series = e["series"].is_null() ? json(nullptr) : e["series"]["value"];
    json resid = e["series"].is_null() ? json(nullptr) : e["series"]["identity_residual"];
    s += fmt(e["point_index"]) + "," + fmt(e["mc"]["dt"]) + "," + fmt(e["mc"]["estimate"]) + "," +
         fmt(e["mc"]["stderr"]) + "," + fmt(series) + "," + fmt(resid) + "\n";
  }
  return s;
}

std::string plot_revuz(const json& r) {
  std::string s = csv_header(r, "point,dt,mean,stderr,median,infinite_fraction,oracle");
  const json& rv = outputs_of(r, "revuz", "revuz");
  for (std::size_t i = 0; i < rv.size(); ++i)
    for (const auto& row : rv[i]["refinement"])
      s += std::to_string(i) + "," + fmt(row["dt"]) + "," + fmt(row["mean"]) + "," + fmt(row["stderr"]) + "," +
           fmt(row["median"]) + "," + fmt(row["infinite_fraction"]) + "," + fmt(rv[i]["oracle"]["value"]["value"]) +
           "\n";
  return s;
}

std::string plot_exit_kernel(const json& r) {
  std::string s = csv_header(r, "d,alpha,normalized_mass,as_printed_mass");
  for (const auto& m : outputs_of(r, "masses", "exit-kernel"))
    s += fmt(m["d"]) + "," + fmt(m["alpha"]) + "," + fmt(m["normalized_mass"]["value"]) + "," +
         (m["as_printed_mass"]["infinite"].get<bool>() ? std::string("inf") : fmt(m["as_printed_mass"]["value"])) +
         "\n";
  return s;
}

const std::vector<std::pair<std::string, std::string (*)(const json&)>>& plotters() {
  static const std::vector<std::pair<std::string, std::string (*)(const json&)>> p = {
      {"fine-limit", plot_fine_limit}, {"classify", plot_classify}, {"capacity", plot_capacity},
      {"fk", plot_fk},                 {"resolvent", plot_resolvent}, {"revuz", plot_revuz},
      {"exit-kernel", plot_exit_kernel},
  };
  return p;
}

/// Side files written by a run of each kind.
std::vector<std::string> side_files(Kind k) {
  switch (k) {
    case Kind::Classify: return {"classify"};
    case Kind::FineLimit: return {"fine-limit"};
    case Kind::Fk: return {"fk"};
    case Kind::Resolvent: return {"resolvent"};
    case Kind::Capacity: return {"capacity"};
    case Kind::RevuzCheck: return {"revuz"};
    case Kind::ExitKernelCheck: return {"exit-kernel"};
    default: return {};
  }
}

}  // namespace

const char* version() { return SMPKIT_VERSION; }

const std::vector<std::string>& plotdata_kinds() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, f] : plotters()) v.push_back(n);
    return v;
  }();
  return names;
}

std::string emit_plotdata(const json& report, const std::string& what) {
  for (const auto& [n, f] : plotters())
    if (n == what) return f(report);
  std::string opts;
  for (const auto& n : plotdata_kinds()) opts += (opts.empty() ? "" : ", ") + n;
  throw ConfigError("plotdata: unknown --what '" + what + "'; options: " + opts);
}

json catalog_json() {
  json out = json::array();
  for (const auto& e : catalog::list()) out.push_back({{"name", e.name}, {"description", e.description}, {"note", e.note}});
  return out;
}

json strip_timing(const json& report) {
  json r = report;
  r.erase("timing");
  return r;
}

RunReport run(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.workers > 0) set_worker_count(opts.workers);
  const auto t0 = Clock::now();
  Context ctx{cfg};
  json outputs;
  switch (cfg.kind) {
    case Kind::Classify: outputs = run_classify(ctx); break;
    case Kind::FineLimit: outputs = run_fine_limit(ctx); break;
    case Kind::WeakTest: outputs = run_weak_test(ctx); break;
    case Kind::Dichotomy: outputs = run_dichotomy(ctx); break;
    case Kind::Fk: outputs = run_fk(ctx); break;
    case Kind::Resolvent: outputs = run_resolvent(ctx); break;
    case Kind::Capacity: outputs = run_capacity(ctx); break;
    case Kind::RevuzCheck: outputs = run_revuz(ctx); break;
    case Kind::ExitKernelCheck: outputs = run_exit_kernel(ctx); break;
  }

  RunReport rr;
  rr.undecided = ctx.undecided;
  rr.exit_code = ctx.undecided ? 2 : 0;
  json& r = rr.report;
  r["report_version"] = kReportVersion;
  r["kind"] = config::to_string(cfg.kind);
  r["seed"] = cfg.seed;
  r["config_hash"] = config::config_hash(cfg.raw);
  r["config"] = config::experiment_content(cfg.raw);
  r["versions"] = versions();
  r["status"] = ctx.undecided ? "undecided" : "completed";
  r["verdicts"] = ctx.verdicts;
  r["outputs"] = outputs;
  json files = json::array();
  for (const auto& what : side_files(cfg.kind)) {
    rr.files.emplace_back(what + ".csv", emit_plotdata(r, what));
    files.push_back(what + ".csv");
  }
  r["files"] = files;
  r["timing"] = {{"wall_seconds", seconds_since(t0)}, {"phases", ctx.phases}, {"workers", worker_count()}};
  if (opts.write_files) write(rr, cfg.output_dir);
  return rr;
}

void write(const RunReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto path = std::filesystem::path(dir);
  std::ofstream(path / "report.json") << r.report.dump(2) << "\n";
  for (const auto& [name, content] : r.files) std::ofstream(path / name) << content;
}

}  // namespace smpkit::harness
