#pragma once

#include <iosfwd>

#include <Eigen/Dense>

#include "basslv/gauss_kernel.hpp"
#include "basslv/measures.hpp"

namespace basslv {

struct SolverConfig {
    double atol = 1e-10;   // stop when the shift-minimized residual falls below
    int max_iters = 10000; // near-non-irreducible pairs legitimately need many
    QuadratureSpec quad;
    MeasureTols tols;
    bool allow_non_irreducible = false;
    int threads = 1;
};

/// Semidiscrete calibration problem: discrete initial law mu, absolutely
/// continuous target law nu, Gaussian smoothing variance t (the interval
/// length for time-scaled instances). Construction validates the
/// structural requirements and throws AssumptionViolation otherwise.
class FixedPointProblem {
  public:
    FixedPointProblem(DiscreteMeasure mu, AnalyticDistribution nu, double variance = 1.0,
                      SolverConfig config = {});

    const DiscreteMeasure& mu() const { return mu_; }
    const AnalyticDistribution& nu() const { return nu_; }
    double variance() const { return variance_; }
    const SolverConfig& config() const { return config_; }

    SMap smap_for(const DiscreteMeasure& state) const;
    /// Problem with marginals pushed forward by x -> s*x and unit variance
    /// (s = 1/sqrt(t)); states map back through scaling by sqrt(t).
    FixedPointProblem rescaled_to_unit_variance() const;

  private:
    DiscreteMeasure mu_;
    AnalyticDistribution nu_;
    double variance_;
    SolverConfig config_;
};

struct IterationRecord {
    int iteration = 0;
    double residual = 0.0;       // shift-minimized ||GQ - Q||_inf (stopping quantity)
    double residual_raw = 0.0;   // plain sup-norm residual before re-gauging
    double rate = 0.0;           // residual_k / residual_{k-1}, 0 for the first record
    double shift = 0.0;          // gauge shift applied after the step
    double dist_to_final = 0.0;  // shift-minimized distance to the last iterate
    double wall_ms = 0.0;        // not serialized: outputs must be reproducible
    DiscreteMeasure state;       // iterate after the step and re-gauging
};

class IterationTrace {
  public:
    const std::vector<IterationRecord>& records() const { return records_; }
    std::vector<IterationRecord>& records() { return records_; }
    std::size_t size() const { return records_.size(); }

    /// Median ratio of successive shift-minimized residuals over the last
    /// `window` steps; the empirical contraction factor.
    double observed_rate(int window = 5) const;
    /// Largest deviation of the last `window` ratios from observed_rate().
    double rate_spread(int window = 5) const;

    void write_csv(std::ostream& out) const;  // iteration,residual,rate,shift
    std::string to_json_string(int indent = -1) const;

  private:
    std::vector<IterationRecord> records_;
};

struct IterateResult {
    DiscreteMeasure state;  // zero-mean gauge representative
    IterationTrace trace;
    bool converged = false;
    int iterations = 0;
};

/// One application of the quantile-space operator: state atom x_i of mu is
/// mapped to S^{-1}(x_i) under the S map of the current state. The output
/// carries mu's weights (atoms colliding within tolerance get merged).
DiscreteMeasure apply_G(const FixedPointProblem& p, const DiscreteMeasure& state);

/// CDF-form counterpart on quantile grids (same operator, grid state).
QuantileGrid apply_A(const FixedPointProblem& p, const QuantileGrid& state);

/// Fixed-point iteration with zero-mean gauge fixing, stopping on the
/// shift-minimized residual. Time-scaled problems are solved by pushing
/// the marginals to unit variance and scaling the result back.
/// Non-irreducible pairs throw AssumptionViolation unless the config
/// overrides; hitting max_iters returns converged = false with the trace.
IterateResult iterate(const FixedPointProblem& p, const DiscreteMeasure& state0);
IterateResult iterate(const FixedPointProblem& p);  // starts from Q_mu itself

struct DerivativeDensity {
    Eigen::MatrixXd values;        // D[i][j] at (output atom i, state atom j)
    Eigen::VectorXd weights;       // integration weights over j
    double eps = 0.0, delta = 0.0; // min / max entry (ellipticity window)
    Eigen::VectorXd row_integrals; // each ~= 1
};

/// Density of the Frechet derivative of the operator at the given state,
/// evaluated on the atom grid: D[i][j] = T(G_i, y_j) / S'(G_i).
DerivativeDensity derivative_density(const FixedPointProblem& p, const DiscreteMeasure& state);

/// Contraction factor (eps + delta) / (2 eps + delta) in (0, 1).
double contraction_bound(const DerivativeDensity& d);

}  // namespace basslv
