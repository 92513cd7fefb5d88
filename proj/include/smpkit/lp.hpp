#pragma once

#include <Eigen/Dense>
#include <string>

namespace smpkit::lp {

struct LpOptions {
  int max_iter = 120;
  double tol = 1e-10;
};

struct LpResult {
  Eigen::VectorXd x;  // primal
  Eigen::VectorXd y;  // row duals, y >= 0
  double primal = 0.0;
  double dual = 0.0;
  double rel_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;
};

/// min c'x  s.t.  A x >= b, x >= 0; dual max b'y s.t. A'y <= c, y >= 0.
/// Mehrotra predictor-corrector on the normal equations (dense).
LpResult solve_inequality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                             const LpOptions& opts = {});

}  // namespace smpkit::lp
