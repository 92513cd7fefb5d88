#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "smpkit/geometry.hpp"
#include "smpkit/kernels.hpp"
#include "smpkit/model.hpp"
#include "smpkit/rng.hpp"

namespace smpkit::paths {

enum class PathEvent { Exited, JumpedOut, Horizon };

/// One killed trajectory. For Euler paths `lifetime` is the summed step time;
/// for stable walks it is the summed expected sojourn of the visited balls.
struct PathRecord {
  Point start;
  Point exit_point;
  PathEvent event = PathEvent::Exited;
  double lifetime = 0.0;
  double pcaf = 0.0;
  bool pcaf_infinite = false;
  long steps = 0;
  std::string stream;
};

struct TracePoint {
  long step;
  Point x;
  double pcaf;
  const char* event;
};

/// Step-by-step settings of the Euler engine.
struct EulerSpec {
  double dt = 1e-3;
  double horizon = std::numeric_limits<double>::infinity();
  /// Potential ν: density terms accumulate ∫V(X)dt, sphere terms the ε-shell occupation.
  model::MeasureSpec nu;
  double shell_eps = 0.0;
  /// f in ∫ e^{-A} f(X) dt (optional).
  std::function<double(const Point&)> running;
  /// β in ∫ e^{-A} dA^β (optional, density terms only).
  model::MeasureSpec beta;
  /// Kill on a Brownian-bridge crossing between grid times.
  bool bridge = true;
  long max_steps = 200'000'000;
  std::vector<TracePoint>* trace = nullptr;
};

struct EulerOutcome {
  Point end;  // boundary projection at exit, or X_t at the horizon
  bool exited = false;
  double time = 0.0;
  double pcaf = 0.0;
  double running = 0.0;
  double beta_integral = 0.0;
  long steps = 0;
};

/// Euler scheme for X = sqrt(2) W (generator Δ) killed on leaving D.
EulerOutcome euler_path(const DomainSpec& domain, const Point& x, const EulerSpec& spec, RngStream& rng);

/// PCAF A^ν_τ of a density potential along one killed Euler path.
PathRecord euler_killed_pcaf(const DomainSpec& domain, const Point& x, const model::MeasureSpec& nu, double dt,
                             RngStream& rng, std::vector<TracePoint>* trace = nullptr);

/// Surface-measure PCAF via (1/2ε)·(occupation time of the ε-shell of S).
/// Requires dt <= ε²/4; `horizon` stops the path early when finite.
PathRecord surface_pcaf(const DomainSpec& domain, const Point& x, const model::SphereSurface& sphere, double weight,
                        double dt, double eps, RngStream& rng,
                        double horizon = std::numeric_limits<double>::infinity());

struct WosResult {
  Point exit_point;
  long steps = 0;
};

/// Walk on spheres until within eps of ∂D; returns the boundary projection.
WosResult wos_exit(const DomainSpec& domain, const Point& x, double eps, RngStream& rng, long max_steps = 1'000'000);

/// Inverse-CDF sampler of the radial part of the normalized stable exit law,
/// tabulated in t = log(ρ/r), where the density is proportional to (e^{2t} - 1)^{-α}.
class StableExitSampler {
 public:
  explicit StableExitSampler(double alpha);
  /// t = log(ρ / r) for a uniform u in (0, 1).
  double sample_log_ratio(double u) const;
  /// P(ρ / r <= e^t) from the table.
  double cdf(double t) const;
  double alpha() const { return alpha_; }
  double t_max() const { return t_.back(); }

 private:
  void build(double t_max);
  double alpha_;
  std::vector<double> t_;
  std::vector<double> F_;
  double tail_rate_ = 0.0;
};

/// Sampler shared per α (built once, thread safe).
const StableExitSampler& stable_sampler(double alpha);

/// Exit point of B(x, r) for the α-stable process started at x.
Point stable_exit_step(const Point& x, double r, double alpha, RngStream& rng);

struct StableWalk {
  Point exit_point;  // first point outside D
  long steps = 0;
  /// Expected sojourn per domain component (union index), summed over steps.
  std::vector<double> sojourn;
  /// Whether the walk ever stood in each component.
  std::vector<bool> visited;
  double lifetime = 0.0;
};

StableWalk stable_wos_exit(const DomainSpec& domain, const Point& x, double alpha, RngStream& rng,
                           long max_steps = 1'000'000);

/// Brownian counterpart with the same per-component bookkeeping: sojourn of
/// each walk-on-spheres ball is (radius^2)/(2d); stops within eps of ∂D.
StableWalk brownian_wos_sojourn(const DomainSpec& domain, const Point& x, double eps, RngStream& rng,
                                long max_steps = 1'000'000);

/// Mean and standard error of per-replicate values, reduced in index order.
struct Summary {
  double mean = 0.0;
  double stderr_ = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};
Summary summarize(const std::vector<double>& values);
double median(std::vector<double> values);

/// Runs fn(i, rng_i) for i in [0, n) in parallel, rng_i = RngStream(seed, task, i).
std::vector<double> replicate(std::size_t n, std::uint64_t seed, std::uint64_t task,
                              const std::function<double(std::size_t, RngStream&)>& fn);

/// CSV path dump: replicate, step, x1..xd, pcaf, event.
void write_trace_csv(std::ostream& os, std::size_t replicate, const std::vector<TracePoint>& trace, bool header);

}  // namespace smpkit::paths
