#pragma once

#include <Eigen/Dense>

namespace basslv {

/// Strictly convex quadratic program
///   min 1/2 x'Hx + g'x   s.t.  Ae x = be,  Ai x >= bi
/// solved by a primal active-set method (null-space steps). H must be
/// symmetric positive definite. Intended for the small, well-conditioned
/// problems that arise from monotone-cone and partial-sum constraints;
/// not a general-purpose sparse solver.
struct QpResult {
    Eigen::VectorXd x;
    bool converged = false;
    int iterations = 0;
};

QpResult solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                  const Eigen::MatrixXd& Ae, const Eigen::VectorXd& be,
                  const Eigen::MatrixXd& Ai, const Eigen::VectorXd& bi,
                  const Eigen::VectorXd& x0, double tol = 1e-11, int max_iter = 0);

}  // namespace basslv
