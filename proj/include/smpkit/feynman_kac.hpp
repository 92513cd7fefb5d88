#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "smpkit/geometry.hpp"
#include "smpkit/model.hpp"

namespace smpkit::fk {

using Fn = std::function<double(const Point&)>;

/// Monte-Carlo budget of one estimator call.
struct FkOptions {
  std::size_t n = 10'000;
  double dt = 1e-3;
  /// Shell half-width for surface terms of ν (0: none present).
  double eps = 0.0;
  std::uint64_t seed = 0;
  /// Stream label; points of one study get distinct tasks derived from it.
  std::string task = "fk";
  double ci_level = 0.99;
};

struct FkEstimate {
  Point point;
  std::string functional;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  double dt = 0.0;
  double eps = 0.0;
  double ci_level = 0.99;
  std::uint64_t seed = 0;

  /// Two-sided normal half-width at ci_level.
  double half_width() const;
  double lo() const { return estimate - half_width(); }
  double hi() const { return estimate + half_width(); }
  bool ci_contains(double v) const { return lo() <= v && v <= hi(); }
};

/// Standard normal quantile for a two-sided interval at `level`.
double normal_quantile_two_sided(double level);

/// P^ν_t f(x) = E_x[e^{-A_t} f(X_t); t < τ_D] for the Brownian operator.
FkEstimate fk_semigroup(const Point& x, double t, const Fn& f, const model::MeasureSpec& nu,
                        const model::OperatorSpec& op, const FkOptions& opts);

/// R^ν f(x) = E_x ∫_0^{τ_D} e^{-A_t} f(X_t) dt for the Brownian operator.
FkEstimate fk_resolvent(const Point& x, const Fn& f, const model::MeasureSpec& nu, const model::OperatorSpec& op,
                        const FkOptions& opts);

/// Value assigned to u(X_{t∧τ}) when the path has left D' by time t.
enum class ExitValue {
  Cemetery,  // killed process: u = 0 after τ
  Stopped,   // stopped process: u evaluated at the boundary point
};

struct RepresentationPoint {
  Point x;
  double u = 0.0;
  /// Per-point estimates of E[e^{-A_{t∧τ}} u(X_{t∧τ})] and E ∫_0^{t∧τ} e^{-A} dA^β.
  FkEstimate first;
  FkEstimate second;
  /// u(x) - first - second; its standard error comes from the per-path differences.
  FkEstimate residual;
  bool flagged = false;  // residual CI excludes 0
};

struct RepresentationReport {
  double t = 0.0;
  ExitValue exit_value = ExitValue::Cemetery;
  std::vector<RepresentationPoint> points;
  std::size_t flagged = 0;
};

/// Checks u(x) = E[e^{-A_{t∧τ}} u(X_{t∧τ})] + E ∫_0^{t∧τ} e^{-A_r} dA^β_r on D'.
/// β must be of density type; `t` may be +inf.
RepresentationReport check_representation(const Fn& u, const model::MeasureSpec& nu, const model::MeasureSpec& beta,
                                          const DomainSpec& sub_domain, double t, const std::vector<Point>& points,
                                          const FkOptions& opts, ExitValue exit_value = ExitValue::Cemetery);

}  // namespace smpkit::fk
