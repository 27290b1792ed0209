#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace basslv {

struct SupportInterval {
    double lo, hi;
    bool bounded() const;
    double length() const { return hi - lo; }
};

/// Numerical tolerances for order/irreducibility diagnostics. The
/// underlying relations are exact; these cutoffs are artifact choices and
/// are surfaced in the run configuration.
struct MeasureTols {
    double convex_order_tol = 1e-9;
    double strict_tol = 1e-10;   // threshold for "potentials strictly apart"
    int fill_points = 512;       // uniform fill of the comparison grid
    int quantile_grid = 4096;    // u-grid for distances involving analytic laws
};

// ---------------------------------------------------------------------------
// DiscreteMeasure

/// Finitely supported probability measure. Construction canonicalizes:
/// atoms sorted, near-duplicates (1e-12 relative) merged with weights
/// summed, weights validated positive with total 1.
class DiscreteMeasure {
  public:
    DiscreteMeasure() = default;
    DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights);

    static DiscreteMeasure point(double x) { return DiscreteMeasure({x}, {1.0}); }
    static DiscreteMeasure equal_weights(std::vector<double> atoms);

    std::size_t size() const { return atoms_.size(); }
    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    /// p_j = w_1 + ... + w_j (p_n == 1).
    const std::vector<double>& cum_weights() const { return cum_; }

    double mean() const;
    SupportInterval support() const { return {atoms_.front(), atoms_.back()}; }

    double cdf(double x) const;       // P(X <= x)
    double cdf_left(double x) const;  // P(X <  x)
    double quantile(double u) const;  // generalized inverse
    double call(double x) const;      // E (X - x)^+
    double potential(double x) const; // E |X - x|

    DiscreteMeasure shifted(double c) const;
    DiscreteMeasure scaled(double s) const;  // pushforward of x -> s*x, s > 0
    /// Same weights, new atom positions (re-canonicalized).
    DiscreteMeasure with_atoms(std::vector<double> atoms) const;

    /// Weighted mean of the atom positions after applying f... not needed;
  private:
    std::vector<double> atoms_, weights_, cum_;
};

// ---------------------------------------------------------------------------
// AnalyticDistribution

struct UniformParams {
    double lo, hi;
};
struct TruncNormalParams {
    double mean, stdev, lo, hi;
};
struct NormalParams {
    double mean, stdev;
};
struct LogisticParams {
    double location, scale;
};
struct PointMassParams {
    double location;
};

/// One closed-form family. Mixtures are represented one level up.
class SimpleDist {
  public:
    using Params = std::variant<UniformParams, TruncNormalParams, NormalParams,
                                LogisticParams, PointMassParams>;
    explicit SimpleDist(Params p);

    const Params& params() const { return p_; }
    double cdf(double x) const;
    double pdf(double x) const;
    double quantile(double u) const;
    double mean() const;
    double call(double x) const;  // E (X - x)^+
    SupportInterval support() const;
    /// integral of the quantile over [u0, u1] (closed form).
    double integrate_quantile(double u0, double u1) const;
    bool is_point_mass() const { return std::holds_alternative<PointMassParams>(p_); }

  private:
    Params p_;
    double phi_lo_ = 0.0, phi_norm_ = 1.0;  // truncated-normal precomputation
};

/// Closed-form distribution: a single family or a finite mixture of
/// families. Quantiles of proper mixtures are computed by monotone root
/// finding on the CDF; everything else is closed form.
class AnalyticDistribution {
  public:
    AnalyticDistribution() : AnalyticDistribution(uniform(0.0, 1.0)) {}

    static AnalyticDistribution uniform(double lo, double hi);
    static AnalyticDistribution trunc_normal(double mean, double stdev, double lo, double hi);
    static AnalyticDistribution normal(double mean, double stdev);
    static AnalyticDistribution logistic(double location, double scale);
    static AnalyticDistribution point_mass(double location);
    static AnalyticDistribution mixture(std::vector<AnalyticDistribution> components,
                                        std::vector<double> weights);

    const std::vector<SimpleDist>& components() const { return comps_; }
    const std::vector<double>& component_weights() const { return weights_; }
    bool is_simple() const { return comps_.size() == 1; }

    double cdf(double x) const;
    double pdf(double x) const;
    double pdf_left(double x) const;  // left limit (derivative convention at kinks)
    double quantile(double u) const;
    /// dQ/du with the left-derivative convention at kink points.
    double quantile_derivative(double u) const;
    double mean() const;
    double call(double x) const;
    double potential(double x) const;  // E |X - x|
    SupportInterval support() const;
    bool compact() const { return support().bounded(); }
    double integrate_quantile(double u0, double u1) const;

    /// u-locations where the quantile may kink (mixture component edges).
    std::vector<double> quantile_kinks() const;
    /// x-locations useful as potential-comparison breakpoints.
    std::vector<double> breakpoints() const;

    /// Minimum density over an n-point grid on the support hull.
    double density_floor(int n = 1024) const;
    /// Absolutely continuous + compact + density bounded away from zero
    /// (grid diagnostic); the admissibility needed of a target law.
    bool admissible_target(int grid = 1024, double floor = 0.0) const;

  private:
    AnalyticDistribution(std::vector<SimpleDist> comps, std::vector<double> weights);
    std::vector<SimpleDist> comps_;
    std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Measure: discrete or analytic, unified read access

class Measure {
  public:
    Measure(DiscreteMeasure m) : v_(std::move(m)) {}
    Measure(AnalyticDistribution d) : v_(std::move(d)) {}

    bool is_discrete() const { return std::holds_alternative<DiscreteMeasure>(v_); }
    const DiscreteMeasure& discrete() const { return std::get<DiscreteMeasure>(v_); }
    const AnalyticDistribution& analytic() const { return std::get<AnalyticDistribution>(v_); }

    double cdf(double x) const;
    double cdf_left(double x) const;
    double quantile(double u) const;
    double mean() const;
    double call(double x) const;
    double potential(double x) const;
    SupportInterval support() const;
    bool compact() const { return support().bounded(); }
    double integrate_quantile(double u0, double u1) const;
    std::vector<double> breakpoints() const;
    std::vector<double> quantile_kinks() const;

  private:
    std::variant<DiscreteMeasure, AnalyticDistribution> v_;
};

/// Potential function u_xi(x) = integral |x - y| xi(dy): convex, piecewise
/// linear for discrete xi, slopes in [-1, 1], >= |x - mean(xi)|.
class PotentialFunction {
  public:
    explicit PotentialFunction(Measure xi);
    double operator()(double x) const { return xi_.potential(x); }
    const std::vector<double>& breakpoints() const { return breaks_; }
    double mean() const { return mean_; }

  private:
    Measure xi_;
    std::vector<double> breaks_;
    double mean_;
};

// ---------------------------------------------------------------------------
// QuantileGrid

/// Monotone quantile function sampled at midpoints u_k = (k - 1/2)/m.
class QuantileGrid {
  public:
    enum class Interp { step, linear };

    QuantileGrid(std::vector<double> values, Interp interp = Interp::step);
    static QuantileGrid sample(const Measure& m, int grid_size, Interp interp = Interp::step);

    int size() const { return static_cast<int>(values_.size()); }
    double u(int k) const { return (k + 0.5) / size(); }
    const std::vector<double>& values() const { return values_; }
    Interp interp() const { return interp_; }

    double quantile(double u) const;
    double cdf(double x) const;
    /// Equal-weight discrete view of the sampled values.
    DiscreteMeasure as_discrete() const;

  private:
    std::vector<double> values_;
    Interp interp_;
};

// ---------------------------------------------------------------------------
// Operations

/// Conditional cell means on n quantile cells: atoms
/// x_i = n * integral_{(i-1)/n}^{i/n} Q(u) du, weights 1/n. Dominated in
/// convex order by the input, with the same mean.
DiscreteMeasure quantize(const Measure& m, int n);
DiscreteMeasure quantize(const AnalyticDistribution& d, int n);

/// Potential-function test for mu <=_c nu: means within tol and
/// u_mu <= u_nu + tol on an adaptive grid (atoms, breakpoints, uniform fill).
bool convex_order_leq(const Measure& mu, const Measure& nu, double tol = 1e-9,
                      const MeasureTols& tols = {});

struct IrreducibleComponent {
    double lo, hi;        // open interval where u_nu > u_mu strictly
    double mu_mass, nu_mass;
};

/// Maximal open intervals with u_nu strictly above u_mu. Requires
/// mu <=_c nu (domain error otherwise). The pair is irreducible iff a
/// single component contains supp(mu).
std::vector<IrreducibleComponent> irreducible_components(const Measure& mu, const Measure& nu,
                                                         const MeasureTols& tols = {});
bool is_irreducible(const Measure& mu, const Measure& nu, const MeasureTols& tols = {});

/// Infinity-Wasserstein distance: ess-sup_u |Q_a(u) - Q_b(u)| (comonotone
/// coupling is optimal in one dimension). Compact supports required.
double w_infinity(const Measure& a, const Measure& b, const MeasureTols& tols = {});

struct ShiftedDistance {
    double distance;  // min_c sup_u |Q_a - Q_b - c|
    double shift;     // the minimizing c
};
ShiftedDistance w_infinity_mod_shift(const Measure& a, const Measure& b,
                                     const MeasureTols& tols = {});

/// 1-Wasserstein distance: integral_0^1 |Q_a - Q_b| du. Compact supports.
double w1(const Measure& a, const Measure& b, const MeasureTols& tols = {});

/// Kolmogorov-Smirnov sup distance between the empirical CDF of a sorted
/// sample and a reference law.
double ks_distance(std::span<const double> sorted_sample, const Measure& ref);

// ---------------------------------------------------------------------------
// Serialization (JSON object form and two-column CSV for DiscreteMeasure)

std::string to_json_string(const Measure& m, int indent = -1);
Measure measure_from_json_string(const std::string& text);
void write_csv(const DiscreteMeasure& m, std::ostream& out);
DiscreteMeasure discrete_from_csv(std::istream& in);

}  // namespace basslv
