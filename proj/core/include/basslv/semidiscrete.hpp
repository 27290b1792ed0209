#pragma once

#include <Eigen/Dense>

#include "basslv/fixedpoint.hpp"

namespace basslv {

/// The semidiscrete nonlinear system: unknown atom positions y_1 <= ... <= y_n
/// with residual R_i(y) = S_y(y_i) - x_i, where S_y is the smoothed map of
/// the candidate state (y, w) and x are the atoms of mu. Solving R = 0 is
/// the direct counterpart of the fixed-point iteration and serves as the
/// cross-check route.
class SemidiscreteSystem {
  public:
    SemidiscreteSystem(DiscreteMeasure mu, AnalyticDistribution nu, double variance = 1.0,
                       SolverConfig config = {});
    explicit SemidiscreteSystem(const FixedPointProblem& p);

    const DiscreteMeasure& mu() const { return mu_; }
    const AnalyticDistribution& nu() const { return nu_; }
    double variance() const { return variance_; }
    const SolverConfig& config() const { return config_; }
    std::size_t size() const { return mu_.size(); }

    Eigen::VectorXd residual(const Eigen::VectorXd& y) const;
    /// dR_i/dy_j = -w_j T(y_i, y_j) + delta_ij S'(y_i); rows annihilate the
    /// all-ones direction (shift degeneracy).
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const;

  private:
    DiscreteMeasure mu_;
    AnalyticDistribution nu_;
    double variance_;
    SolverConfig config_;
};

struct NewtonOptions {
    double atol = 1e-11;        // on ||R||_inf
    int max_iters = 50;
    int max_halvings = 30;      // backtracking line search
};

struct NewtonResult {
    std::vector<double> y;      // sorted, gauge sum_j w_j y_j = 0
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
    std::vector<double> singular_values;  // of the Jacobian at the solution
    std::string to_json_string(int indent = -1) const;
};

/// Damped Newton on the gauge-augmented system (the zero-weighted-mean
/// constraint removes the translation null direction). Steps that break
/// monotonicity of y or fail to reduce ||R||_inf are halved.
NewtonResult solve_newton(const SemidiscreteSystem& sys, const Eigen::VectorXd& y0,
                          const NewtonOptions& opts = {});
/// Default start: one operator sweep from Q_mu.
NewtonResult solve_newton(const SemidiscreteSystem& sys, const NewtonOptions& opts = {});

/// Half-size system for symmetric inputs: y_{n+1-j} = 2c - y_j is
/// substituted (c the common center), leaving ceil(n/2) unknowns.
class ReducedSystem {
  public:
    explicit ReducedSystem(const SemidiscreteSystem& full);

    std::size_t reduced_size() const { return half_; }
    double center() const { return center_; }
    const SemidiscreteSystem& full() const { return full_; }

    /// Expand reduced unknowns to the full, mirror-symmetric y vector.
    Eigen::VectorXd expand(const Eigen::VectorXd& y_half) const;
    Eigen::VectorXd residual(const Eigen::VectorXd& y_half) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& y_half) const;
    NewtonResult solve(const NewtonOptions& opts = {}) const;

  private:
    SemidiscreteSystem full_;
    std::size_t half_;
    bool odd_;
    double center_;
};

/// Validates quantile symmetry of mu and nu; domain error when asymmetric.
ReducedSystem symmetry_reduce(const SemidiscreteSystem& sys, double tol = 1e-9);

}  // namespace basslv
