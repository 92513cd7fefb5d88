#include "smpkit/capacity.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "smpkit/errors.hpp"
#include "smpkit/lp.hpp"
#include "smpkit/parallel.hpp"
#include "smpkit/quadrature.hpp"

namespace smpkit::capacity {

Grid Grid::cube(int d, int n, double half) {
  if (n < 1 || !(half > 0.0)) throw ConfigError("Grid::cube: n >= 1 and half > 0 required");
  Grid g;
  g.lo = Point(d);
  for (int i = 0; i < d; ++i) g.lo[i] = -half;
  g.h = 2.0 * half / n;
  g.shape.assign(static_cast<std::size_t>(d), n);
  return g;
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

std::vector<int> Grid::multi_index(std::size_t idx) const {
  std::vector<int> m(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    m[k] = static_cast<int>(idx % static_cast<std::size_t>(shape[k]));
    idx /= static_cast<std::size_t>(shape[k]);
  }
  return m;
}

Point Grid::center(std::size_t idx) const {
  auto m = multi_index(idx);
  Point p(dim());
  for (int i = 0; i < dim(); ++i) p[i] = lo[i] + (m[static_cast<std::size_t>(i)] + 0.5) * h;
  return p;
}

double Grid::cell_volume() const { return std::pow(h, dim()); }

std::vector<std::size_t> Grid::cells_in_ball(const Point& c, double r) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (distance(center(i), c) < r) out.push_back(i);
  return out;
}

std::size_t Grid::cell_of(const Point& p) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) {
    int k = static_cast<int>(std::floor((p[i] - lo[i]) / h));
    if (k < 0 || k >= shape[static_cast<std::size_t>(i)]) throw DomainError("Grid::cell_of: point outside the grid");
    idx = idx * static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]) + static_cast<std::size_t>(k);
  }
  return idx;
}

double ball_self_average(int d, double p, double a) {
  if (!(p < d)) throw DomainError("ball_self_average: p < d required");
  // Distance law of two uniform points: d s^{d-1}/a^d · I_{1-s²/4a²}((d+1)/2, 1/2) on (0, 2a).
  auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    double x = std::max(0.0, 1.0 - t * t);
    return std::pow(t, d - 1 - p) * boost::math::ibeta(0.5 * (d + 1), 0.5, x);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double I = ts.integrate(f, 0.0, 1.0);
  return d * std::pow(2.0, d - p) * std::pow(a, -p) * I;
}

CapacityProblem CapacityProblem::riesz(Grid grid, std::vector<std::size_t> target, double alpha, double p) {
  CapacityProblem pr;
  int d = grid.dim();
  pr.kernel = kernels::GreenKernel::riesz(d, alpha);
  pr.scale = 1.0 / kernels::riesz_constant(d, alpha);
  pr.grid = std::move(grid);
  pr.target = std::move(target);
  pr.p = p;
  return pr;
}

double CapacityProblem::self_interaction() const {
  if (kernel.singularity() == kernels::SingularityKind::Log)
    throw PreconditionError("capacity: logarithmic kernels are not supported");
  int d = grid.dim();
  double a = std::pow(grid.cell_volume() / quad::unit_ball_volume(d), 1.0 / d);
  return scale * kernel.leading_constant() * ball_self_average(d, kernel.exponent(), a);
}

double CapacityProblem::entry(std::size_t i, std::size_t j) const {
  Point xi = grid.center(i);
  if (i != j) return scale * kernel(xi, grid.center(j));
  double v = self_interaction();
  if (kernel.form() != kernels::GreenForm::WholeSpaceRiesz) {
    // Add the bounded part G - c|x-y|^{-p} near the diagonal.
    double eps = 1e-3 * grid.h;
    Point y = xi;
    y[0] += eps;
    v += scale * (kernel(xi, y) - kernel.leading_constant() * std::pow(eps, -kernel.exponent()));
  }
  return v;
}

namespace {

/// Kernel entries with the cell centres and diagonal precomputed.
class Evaluator {
 public:
  explicit Evaluator(const CapacityProblem& pr) : pr_(pr), self_(pr.self_interaction()) {
    centers_.reserve(pr.grid.size());
    for (std::size_t i = 0; i < pr.grid.size(); ++i) centers_.push_back(pr.grid.center(i));
  }
  double operator()(std::size_t i, std::size_t j) const {
    if (i != j) return pr_.scale * pr_.kernel(centers_[i], centers_[j]);
    if (pr_.kernel.form() == kernels::GreenForm::WholeSpaceRiesz) return self_;
    return pr_.entry(i, i);
  }

 private:
  const CapacityProblem& pr_;
  double self_;
  std::vector<Point> centers_;
};

std::vector<std::size_t> shell_of(const Grid& g, const std::vector<std::size_t>& cells) {
  std::unordered_set<std::size_t> in(cells.begin(), cells.end());
  std::vector<std::size_t> out;
  const int d = g.dim();
  for (std::size_t c : cells) {
    auto m = g.multi_index(c);
    bool edge = false;
    for (int k = 0; k < d && !edge; ++k)
      for (int s : {-1, 1}) {
        auto mm = m;
        mm[static_cast<std::size_t>(k)] += s;
        if (mm[static_cast<std::size_t>(k)] < 0 || mm[static_cast<std::size_t>(k)] >= g.shape[static_cast<std::size_t>(k)]) {
          edge = true;
          break;
        }
        std::size_t idx = 0;
        for (int q = 0; q < d; ++q)
          idx = idx * static_cast<std::size_t>(g.shape[static_cast<std::size_t>(q)]) +
                static_cast<std::size_t>(mm[static_cast<std::size_t>(q)]);
        if (!in.count(idx)) {
          edge = true;
          break;
        }
      }
    if (edge) out.push_back(c);
  }
  return out;
}

struct Covering {
  std::vector<std::size_t> rows, cols;
  std::vector<double> x, y;
  double value = 0.0, dual = 0.0, gap = 0.0;
  int iterations = 0, rounds = 0;
  bool converged = false;
};

/// min Σx s.t. K[rows_all, cols_all] x >= 1, x >= 0, with row and column generation.
Covering covering(const CapacityProblem& pr, const std::vector<std::size_t>& rows_all,
                  const std::vector<std::size_t>& cols_all, const C1Options& opts) {
  constexpr double kViol = 1e-8;
  Evaluator K(pr);
  Covering cov;
  std::unordered_set<std::size_t> col_set(cols_all.begin(), cols_all.end());
  cov.rows = shell_of(pr.grid, rows_all);
  if (cov.rows.empty()) cov.rows = rows_all;
  for (std::size_t r : cov.rows)
    if (col_set.count(r)) cov.cols.push_back(r);
  if (cov.cols.empty()) cov.cols.assign(cols_all.begin(), cols_all.begin() + std::min<std::size_t>(cols_all.size(), 64));

  lp::LpOptions lo;
  for (int round = 0; round < opts.max_rounds; ++round) {
    cov.rounds = round + 1;
    const auto m = static_cast<Eigen::Index>(cov.rows.size()), n = static_cast<Eigen::Index>(cov.cols.size());
    Eigen::MatrixXd A(m, n);
    parallel_for(cov.rows.size(), [&](std::size_t i) {
      for (Eigen::Index j = 0; j < n; ++j)
        A(static_cast<Eigen::Index>(i), j) = K(cov.rows[i], cov.cols[static_cast<std::size_t>(j)]);
    });
    auto res = lp::solve_inequality_lp(A, Eigen::VectorXd::Ones(m), Eigen::VectorXd::Ones(n), lo);
    cov.iterations += res.iterations;
    cov.x.assign(res.x.data(), res.x.data() + n);
    cov.y.assign(res.y.data(), res.y.data() + m);
    cov.value = res.primal;
    cov.dual = res.dual;
    cov.gap = res.rel_gap;
    if (!res.converged) throw ConvergenceError("capacity LP: " + res.status, res.rel_gap);

    std::unordered_set<std::size_t> rs(cov.rows.begin(), cov.rows.end()), cs(cov.cols.begin(), cov.cols.end());
    std::vector<std::size_t> cand_r, cand_c;
    for (std::size_t r : rows_all)
      if (!rs.count(r)) cand_r.push_back(r);
    for (std::size_t c : cols_all)
      if (!cs.count(c)) cand_c.push_back(c);
    std::vector<double> vr(cand_r.size()), vc(cand_c.size());
    parallel_for(cand_r.size(), [&](std::size_t k) {
      CompensatedSum s;
      for (std::size_t j = 0; j < cov.cols.size(); ++j)
        if (cov.x[j] > 0.0) s.add(K(cand_r[k], cov.cols[j]) * cov.x[j]);
      vr[k] = 1.0 - s.value();  // > 0: row violated
    });
    parallel_for(cand_c.size(), [&](std::size_t k) {
      CompensatedSum s;
      for (std::size_t i = 0; i < cov.rows.size(); ++i)
        if (cov.y[i] > 0.0) s.add(K(cov.rows[i], cand_c[k]) * cov.y[i]);
      vc[k] = s.value() - 1.0;  // > 0: reduced cost negative
    });
    auto pick = [&](const std::vector<std::size_t>& cand, const std::vector<double>& v) {
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k < cand.size(); ++k)
        if (v[k] > kViol) idx.push_back(k);
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
      if (idx.size() > opts.batch) idx.resize(opts.batch);
      std::vector<std::size_t> out;
      for (std::size_t k : idx) out.push_back(cand[k]);
      std::sort(out.begin(), out.end());
      return out;
    };
    auto add_r = pick(cand_r, vr), add_c = pick(cand_c, vc);
    if (add_r.empty() && add_c.empty()) {
      cov.converged = true;
      return cov;
    }
    cov.rows.insert(cov.rows.end(), add_r.begin(), add_r.end());
    cov.cols.insert(cov.cols.end(), add_c.begin(), add_c.end());
  }
  throw ConvergenceError("capacity LP: row/column generation did not settle", cov.gap);
}

double min_potential_minus_one(const CapacityProblem& pr, const std::vector<std::size_t>& rows,
                               const std::vector<std::size_t>& cols, const std::vector<double>& w) {
  Evaluator K(pr);
  std::vector<double> v(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (w[j] > 0.0) s.add(K(rows[i], cols[j]) * w[j]);
    v[i] = s.value() - 1.0;
  });
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

std::vector<std::size_t> all_cells(const Grid& g) {
  std::vector<std::size_t> v(g.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

CapacitySolution solve_c1(const CapacityProblem& pr, const C1Options& opts) {
  CapacitySolution sol;
  sol.method = "interior-point LP with row/column generation";
  if (pr.target.empty()) {
    sol.converged = true;
    return sol;
  }
  const auto& cols = pr.support.empty() ? pr.target : pr.support;
  auto cov = covering(pr, pr.target, cols, opts);
  sol.value = cov.value;
  sol.cells = cov.cols;
  sol.optimizer = cov.x;
  for (double& v : sol.optimizer) v = std::max(v, 0.0);
  sol.dual_value = cov.dual;
  sol.duality_gap = cov.gap;
  sol.iterations = cov.iterations;
  sol.converged = cov.converged && cov.gap <= opts.gap_tol;
  sol.feasibility_residual = min_potential_minus_one(pr, pr.target, sol.cells, sol.optimizer);
  return sol;
}

CapacitySolution solve_dual_c1(const CapacityProblem& pr, const C1Options& opts) {
  CapacitySolution sol;
  sol.method = "interior-point LP with row/column generation (dual of covering over all cells)";
  if (pr.target.empty()) {
    sol.converged = true;
    return sol;
  }
  auto cov = covering(pr, pr.target, all_cells(pr.grid), opts);
  sol.value = cov.dual;
  sol.dual_value = cov.value;
  sol.cells = cov.rows;
  sol.optimizer = cov.y;
  for (double& v : sol.optimizer) v = std::max(v, 0.0);
  sol.duality_gap = cov.gap;
  sol.iterations = cov.iterations;
  sol.converged = cov.converged && cov.gap <= opts.gap_tol;
  // Packing feasibility: min over the grid of 1 - Rμ.
  auto cells = all_cells(pr.grid);
  Evaluator K(pr);
  std::vector<double> v(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < sol.cells.size(); ++j)
      if (sol.optimizer[j] > 0.0) s.add(K(cells[i], sol.cells[j]) * sol.optimizer[j]);
    v[i] = 1.0 - s.value();
  });
  sol.feasibility_residual = *std::min_element(v.begin(), v.end());
  return sol;
}

CapacitySolution solve_cp(const CapacityProblem& pr, const CpOptions& opts) {
  CapacitySolution sol;
  sol.method = "accelerated projected dual gradient with backtracking";
  if (!(pr.p > 1.0)) throw PreconditionError("solve_cp: p > 1 required");
  if (pr.target.empty()) {
    sol.converged = true;
    return sol;
  }
  const auto cols = pr.support.empty() ? all_cells(pr.grid) : pr.support;
  const std::size_t m = pr.target.size(), n = cols.size();
  if (static_cast<double>(m) * static_cast<double>(n) > 6e7)
    throw ConfigError("solve_cp: problem too large for the dense solver");
  const double w = pr.grid.cell_volume();
  const double p = pr.p, q = 1.0 / (p - 1.0);
  Evaluator ev(pr);
  Eigen::MatrixXd K(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  parallel_for(m, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j)
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ev(pr.target[i], cols[j]) * w;
  });
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    if (!(K.row(i).maxCoeff() > 1e-300)) throw PreconditionError("solve_cp: infeasible discretization (zero kernel row)");

  auto f_of = [&](const Eigen::VectorXd& lam) {
    Eigen::VectorXd t = K.transpose() * lam;
    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < f.size(); ++j) f(j) = std::pow(std::max(t(j), 0.0) / (p * w), q);
    return f;
  };
  auto energy = [&](const Eigen::VectorXd& f) { return w * f.array().pow(p).sum(); };
  auto dual = [&](const Eigen::VectorXd& lam, const Eigen::VectorXd& f) { return lam.sum() - (p - 1.0) * energy(f); };

  // Best multiple of the all-ones multiplier as the start.
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
  {
    double S = energy(f_of(lam));
    lam *= std::pow(static_cast<double>(m) / (p * S), p - 1.0);
  }
  Eigen::VectorXd z = lam, f = f_of(lam);
  double best_primal = std::numeric_limits<double>::infinity(), best_dual = -best_primal;
  Eigen::VectorXd best_f = f;
  double L = 1.0, tk = 1.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    f = f_of(lam);
    best_dual = std::max(best_dual, dual(lam, f));
    Eigen::VectorXd Kf = K * f;
    double mn = Kf.minCoeff();
    if (mn > 0.0) {
      double s = 1.0 / mn;
      double val = std::pow(s, p) * energy(f);
      if (val < best_primal) {
        best_primal = val;
        best_f = s * f;
      }
    }
    if (best_primal - best_dual <= opts.gap_tol * best_primal) break;

    Eigen::VectorXd fz = f_of(z);
    double gz = dual(z, fz);
    Eigen::VectorXd grad = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)) - K * fz;
    Eigen::VectorXd next;
    for (int bt = 0; bt < 60; ++bt) {
      next = (z + grad / L).cwiseMax(0.0);
      Eigen::VectorXd diff = next - z;
      if (dual(next, f_of(next)) >= gz + grad.dot(diff) - 0.5 * L * diff.squaredNorm()) break;
      L *= 2.0;
    }
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    z = next + ((tk - 1.0) / tn) * (next - lam);
    lam = next;
    tk = tn;
    L *= 0.9;
  }
  sol.value = best_primal;
  sol.dual_value = best_dual;
  sol.duality_gap = (best_primal - best_dual) / best_primal;
  sol.iterations = it;
  sol.converged = sol.duality_gap <= opts.gap_tol;
  sol.cells = cols;
  sol.optimizer.assign(best_f.data(), best_f.data() + best_f.size());
  Eigen::VectorXd Kf = K * best_f;
  sol.feasibility_residual = Kf.minCoeff() - 1.0;
  return sol;
}

}  // namespace smpkit::capacity
