#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smpkit/kernels.hpp"
#include "smpkit/model.hpp"

namespace smpkit::potentials {

enum class PotentialMethod { ClosedFormRadial, AdaptiveQuadrature };

struct PotentialOptions {
  double tol = 1e-6;
  int min_level = 8;
  int max_level = 64;
};

/// Rμ(x) with the tolerance actually reached. `warning` is set when the
/// requested tolerance was not met at max_level.
struct PotentialValue {
  model::ExtendedReal value;
  double achieved_tol = 0.0;
  bool warning = false;
  PotentialMethod method = PotentialMethod::AdaptiveQuadrature;
};

/// ∫ G_D(x, y) μ(dy) for a ball domain (closed-form Green kernel).
PotentialValue potential(const model::MeasureSpec& mu, const model::OperatorSpec& op, const Point& x,
                         const PotentialOptions& opts = {});

/// Ordinary least squares fit of J against regressors with standard errors.
struct FitTerm {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct LocalFit {
  bool ok = false;   // false: "no-fit", only the raw table is meaningful
  FitTerm constant;  // a
  FitTerm log_coef;  // b in a + b log(1/δ)
  FitTerm power_coef;  // c in a + c δ^{-γ}
  double gamma = 0.0;
  double log_rss = 0.0;
  double power_rss = 0.0;
};

struct LocalGreenIntegral {
  Point x;
  double r = 0.0;
  std::vector<double> deltas;  // decreasing
  std::vector<double> J;       // J[j] = ∫_{δ_j < |y-x| < r} G(x,y) ν(dy), nondecreasing
  std::vector<double> increments;
  bool divergent_piece = false;  // some annulus piece itself diverged (pole on a ray end)
  double quad_tol = 0.0;         // worst achieved quadrature tolerance over pieces
  LocalFit fit;
};

struct LocalOptions {
  int angular_level = 16;
};

/// J_δ(x, r) over the δ schedule. Requires B(x, r) ⊂ D.
LocalGreenIntegral local_green_integral(const Point& x, double r, const std::vector<double>& deltas,
                                        const model::MeasureSpec& nu, const model::OperatorSpec& op,
                                        const LocalOptions& opts = {});

/// Fit a + b log(1/δ) and a + c δ^{-γ} to a J_δ table.
LocalFit fit_local(const std::vector<double>& deltas, const std::vector<double>& J, double se_floor);

struct NeumannOptions {
  int radial_nodes = 16;
  int angular_level = 8;
  int max_terms = 60;
  double tol = 1e-10;
};

struct NeumannResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int terms = 0;
  std::vector<double> partial_sums;
  double contraction = 0.0;  // observed term ratio
};

/// Nyström discretization of R on a ball, with the singular part of G
/// subtracted analytically, used to sum Σ_k (-1)^k T^k(Rf), T(w) = R(w ν).
class NeumannResolvent {
 public:
  using Fn = std::function<double(const Point&)>;

  NeumannResolvent(const model::OperatorSpec& op, const model::MeasureSpec& nu, const NeumannOptions& opts = {});

  /// A source given at the nodes and at arbitrary points, with the nodal
  /// series iterates w_0 = R f, w_k = R(ν w_{k-1}) cached so that each
  /// evaluation point costs one row per term.
  struct Source {
    std::vector<double> nodal;
    Fn at;
    std::vector<std::vector<double>> iterates;
  };

  Source source(const Fn& f) const;
  /// (R_h f)·ν, the second source of the resolvent identity.
  Source potential_times_nu(const Fn& f) const;

  /// Discrete Rf(x).
  double potential(const Fn& f, const Point& x) const;
  /// R^ν f(x) by the alternating series.
  NeumannResult apply(const Source& s, const Point& x) const;
  NeumannResult apply(const Fn& f, const Point& x) const { return apply(source(f), x); }

  /// |R^ν f + R^ν((R f) ν) - R f| at x, all three with the same discrete operator.
  double identity_residual(const Fn& f, const Point& x) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  double green(const Point& x, const Point& y) const { return kernel_(x, y); }
  double residence(const Point& x) const;
  double nu_density(const Point& y) const;
  /// Σ_j G(x, y_j) W_j v_j (subtracted form), given v at the nodes and v(x).
  double apply_row(const Point& x, const std::vector<double>& v, double vx) const;
  std::vector<double> apply_nodes(const std::vector<double>& v) const;
  void fill_iterates(Source& s) const;

  model::OperatorSpec op_;
  model::MeasureSpec nu_;
  NeumannOptions opts_;
  kernels::GreenKernel kernel_;
  std::vector<Point> nodes_;
  std::vector<double> weights_;
  std::vector<double> nu_nodes_;
  std::vector<double> row_sum_;   // Σ_j G(y_i, y_j) W_j
  std::vector<double> matrix_;    // G(y_i, y_j) W_j, zero on the diagonal
};

/// One-shot wrapper: R^ν f(x).
NeumannResult neumann_resolvent(const std::function<double(const Point&)>& f, const model::MeasureSpec& nu,
                                const model::OperatorSpec& op, const Point& x, const NeumannOptions& opts = {});

}  // namespace smpkit::potentials
