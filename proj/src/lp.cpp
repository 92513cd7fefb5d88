#include "smpkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smpkit::lp {

namespace {

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  return a;
}

}  // namespace

LpResult solve_inequality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                             const LpOptions& opts) {
  const Eigen::Index m = A.rows(), n = A.cols();
  const double N = static_cast<double>(m + n);
  LpResult res;

  // Standard form over z = (x, s): A x - s = b, z >= 0, reduced costs w = (wx, ws).
  double theta = std::max({1.0, b.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, theta), s = Eigen::VectorXd::Constant(m, theta);
  Eigen::VectorXd wx = Eigen::VectorXd::Constant(n, theta), ws = Eigen::VectorXd::Constant(m, theta);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  const double bnorm = 1.0 + b.norm(), cnorm = 1.0 + c.norm();

  Eigen::MatrixXd M(m, m), AD(m, n);
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd rp = b - (A * x - s);
    Eigen::VectorXd rdx = c - A.transpose() * y - wx;
    Eigen::VectorXd rds = y - ws;
    double mu = (x.dot(wx) + s.dot(ws)) / N;
    res.primal = c.dot(x);
    res.dual = b.dot(y);
    res.rel_gap = std::abs(res.primal - res.dual) / (1.0 + std::abs(res.primal));
    res.iterations = it;
    double pinf = rp.norm() / bnorm;
    double dinf = std::sqrt(rdx.squaredNorm() + rds.squaredNorm()) / cnorm;
    if (pinf < opts.tol && dinf < opts.tol && res.rel_gap < opts.tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd dx = x.cwiseQuotient(wx), ds = s.cwiseQuotient(ws);
    Eigen::VectorXd sdx = dx.cwiseSqrt();
    AD = A * sdx.asDiagonal();
    M.setZero();
    M.selfadjointView<Eigen::Lower>().rankUpdate(AD);
    M.diagonal() += ds;
    double reg = 1e-14 * M.diagonal().maxCoeff();
    M.diagonal().array() += reg;
    llt.compute(M.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
      res.status = "normal equations not positive definite";
      break;
    }

    struct Dir {
      Eigen::VectorXd dx, ds, dy, dwx, dws;
    };
    auto solve = [&](const Eigen::VectorXd& rcx, const Eigen::VectorXd& rcs) {
      Dir d;
      Eigen::VectorXd tx = rcx.cwiseQuotient(wx) - dx.cwiseProduct(rdx);
      Eigen::VectorXd rhs = rp - A * tx + rcs.cwiseQuotient(ws) - ds.cwiseProduct(rds);
      d.dy = llt.solve(rhs);
      Eigen::VectorXd aty = A.transpose() * d.dy;
      d.dx = tx + dx.cwiseProduct(aty);
      d.ds = rcs.cwiseQuotient(ws) - ds.cwiseProduct(rds) - ds.cwiseProduct(d.dy);
      d.dwx = rdx - aty;
      d.dws = rds + d.dy;
      return d;
    };

    Dir aff = solve(-x.cwiseProduct(wx), -s.cwiseProduct(ws));
    double ap = std::min(max_step(x, aff.dx), max_step(s, aff.ds));
    double ad = std::min(max_step(wx, aff.dwx), max_step(ws, aff.dws));
    double mu_aff = ((x + ap * aff.dx).dot(wx + ad * aff.dwx) + (s + ap * aff.ds).dot(ws + ad * aff.dws)) / N;
    double sigma = std::pow(mu_aff / mu, 3);

    Eigen::VectorXd rcx = Eigen::VectorXd::Constant(n, sigma * mu) - x.cwiseProduct(wx) - aff.dx.cwiseProduct(aff.dwx);
    Eigen::VectorXd rcs = Eigen::VectorXd::Constant(m, sigma * mu) - s.cwiseProduct(ws) - aff.ds.cwiseProduct(aff.dws);
    Dir d = solve(rcx, rcs);
    ap = std::min(1.0, 0.995 * std::min(max_step(x, d.dx), max_step(s, d.ds)));
    ad = std::min(1.0, 0.995 * std::min(max_step(wx, d.dwx), max_step(ws, d.dws)));
    x += ap * d.dx;
    s += ap * d.ds;
    y += ad * d.dy;
    wx += ad * d.dwx;
    ws += ad * d.dws;
    res.iterations = it + 1;
  }
  res.x = x;
  res.y = y;
  res.primal = c.dot(x);
  res.dual = b.dot(y);
  res.rel_gap = std::abs(res.primal - res.dual) / (1.0 + std::abs(res.primal));
  if (res.status.empty()) res.status = res.converged ? "optimal" : "iteration limit";
  return res;
}

}  // namespace smpkit::lp
