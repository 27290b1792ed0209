#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "basslv/fixedpoint.hpp"
#include "basslv/numeric/pchip.hpp"
#include "basslv/semidiscrete.hpp"

namespace basslv {

/// Terminal map and its heat smoothings for one interval:
///   f(x)   = Q_nu( (phi_t * F_alpha)(x) ),     t the interval length,
///   f_tau  = phi_tau * f,  tau in [0, t] the time remaining.
/// f pushes alpha * gamma_t to nu exactly; at tau = t the smoothed map
/// sends alpha's atoms back to mu's atoms (that is the fixed-point
/// identity), which is what build_maps verifies.
struct TransportMaps {
    DiscreteMeasure alpha;
    DiscreteMeasure mu;
    AnalyticDistribution nu;
    double variance = 1.0;
    QuadratureSpec quad;

    double f(double x) const;
    /// phi_tau * f at x; tau = 0 evaluates f itself.
    double f_remaining(double tau, double x) const;
    /// Monotone-cubic table of f_remaining(tau, .) on grid_points covering
    /// the reachable x-range (8 standard deviations beyond alpha's hull).
    MonotoneCubic tabulate(double tau, int grid_points = 2048) const;
};

/// Validates that alpha solves the fixed-point system to the given
/// residual tolerance, then assembles the maps. Stale or non-converged
/// alpha is a domain error.
TransportMaps build_maps(const FixedPointProblem& p, const DiscreteMeasure& alpha,
                         double residual_atol = 1e-8);

struct BassInterval {
    double t0 = 0.0, t1 = 1.0;
    TransportMaps maps;
    double residual = 0.0;     // fixed-point residual of alpha
    IterationTrace trace;      // empty for the Newton route
    int iterations = 0;
};

struct CalibratedBassModel {
    std::vector<double> maturities;           // T_1 < ... < T_n
    std::vector<Measure> marginals;           // as provided
    std::vector<BassInterval> intervals;      // n - 1 entries
};

enum class SolverChoice { fixed_point, newton };

struct CalibrationConfig {
    SolverConfig solver;
    SolverChoice method = SolverChoice::fixed_point;
    int quantize_atoms = 50;   // discretization of each interval's initial law
    double build_atol = 1e-8;  // residual gate when assembling maps
};

/// Per-interval fixed points with variance scaling. Marginals must be
/// increasing in convex order; interior and terminal marginals must be
/// admissible target laws. Non-irreducible consecutive pairs throw unless
/// the solver config allows proceeding.
CalibratedBassModel calibrate_bass_lv(const std::vector<std::pair<double, Measure>>& marginals,
                                      const CalibrationConfig& config);

// ---------------------------------------------------------------------------
// Simulation

struct SimulationSpec {
    std::size_t n_paths = 10000;
    std::vector<double> times;  // maturities are always included
    std::uint64_t seed = 0;
    int threads = 1;
    int table_grid = 2048;
};

/// Simulated martingale values. Reproducible: path i draws from a
/// counter-based stream keyed by (seed, i), so results are independent of
/// the parallel schedule. rng_version() is recorded.
struct PathBatch {
    std::uint64_t seed = 0;
    std::string rng;
    std::vector<double> times;
    std::size_t n_paths = 0;
    std::vector<double> values;  // row-major [path][time]

    double at(std::size_t path, std::size_t t) const { return values[path * times.size() + t]; }
    std::vector<double> column(std::size_t t) const;

    void write_summary_csv(std::ostream& out) const;
    void write_binary(std::ostream& out) const;  // little-endian dump
    static PathBatch read_binary(std::istream& in);
};

PathBatch simulate(const CalibratedBassModel& model, const SimulationSpec& spec);
PathBatch simulate(const TransportMaps& maps, const SimulationSpec& spec);

// ---------------------------------------------------------------------------
// Diagnostics

struct DecileCheck {
    double bin_mean_start = 0.0;  // E[M_t | bin]
    double bin_mean_end = 0.0;    // E[M_T | M_t in bin]
    double stderr_end = 0.0;
    double gap() const { return bin_mean_end - bin_mean_start; }
};

struct MartingaleReport {
    double mean_drift = 0.0;       // mean(M_T) - mean(M_first)
    double drift_stderr = 0.0;
    std::vector<DecileCheck> deciles;          // over M at the first time
    std::vector<double> ks_per_maturity;       // against the model marginals
    double ks_threshold = 0.0;                 // 1.95 / sqrt(N)
    bool marginals_ok = true;
    bool martingale_ok = true;                 // deciles within 4 standard errors
    std::string to_json_string(int indent = -1) const;
};

MartingaleReport martingale_diagnostics(const PathBatch& batch, const CalibratedBassModel& model);

}  // namespace basslv
