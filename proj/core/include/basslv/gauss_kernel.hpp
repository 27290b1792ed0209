#pragma once

#include <optional>

#include "basslv/measures.hpp"

namespace basslv {

/// Centered Gaussian smoothing kernel of a given variance.
struct HeatKernel {
    double variance;
    explicit HeatKernel(double t);
    double pdf(double x) const;
    double cdf(double x) const;
};

struct QuadratureSpec {
    int hermite_order = 64;
    double invert_rtol = 1e-12;  // |S(x) - target| <= rtol * (1 + |target|)
    int invert_max_iter = 200;
};

/// Gaussian smoothing of a CDF evaluated through its quantile function:
/// returns integral_0^1 N(x - Q(y); t) dy, which equals (phi_t * F)(x).
/// Exact (up to normal-CDF accuracy) for discrete and step-grid states;
/// closed-form cell integrals for linearly interpolated grids.
double phi_convolve_cdf(const DiscreteMeasure& F, double t, double x);
double phi_convolve_cdf(const QuantileGrid& F, double t, double x);
double phi_convolve_cdf(const Measure& F, double t, double x);

/// The strictly increasing map
///   S(x) = integral Q_nu( integral_0^1 N_t(x - Q(y) - z) dy ) N_t(z) dz,
/// its derivative, its inverse, and the positive kernel T(x, y) whose
/// integral over the reference law reproduces S'. The reference quantile Q
/// is a bounded state (discrete or grid); the target law must be
/// absolutely continuous with compact support and positive density floor.
/// Both smoothing steps use the same variance t.
///
/// Immutable after construction; evaluation is const and thread-safe.
class SMap {
  public:
    SMap(DiscreteMeasure reference, AnalyticDistribution target, double variance = 1.0,
         QuadratureSpec quad = {});
    SMap(const QuantileGrid& reference, AnalyticDistribution target, double variance = 1.0,
         QuadratureSpec quad = {});

    double eval(double x) const;
    double derivative(double x) const;
    /// Unique x with S(x) ~= target; range error if the value is not
    /// strictly inside the interior of the target's support hull.
    double invert(double target, std::optional<double> hint = {}) const;
    double t_kernel(double x, double y) const;

    /// integral_0^1 N_t(x - Q(y)) dy, the inner smoothed CDF.
    double inner_cdf(double x) const;
    /// d/dx of inner_cdf.
    double inner_pdf(double x) const;

    const AnalyticDistribution& target() const { return target_; }
    const DiscreteMeasure& reference() const { return reference_; }
    double variance() const { return variance_; }
    SupportInterval range() const;  // open interval (interior of target hull)

  private:
    DiscreteMeasure reference_;
    AnalyticDistribution target_;
    double variance_;
    QuadratureSpec quad_;
    std::vector<double> z_nodes_, z_weights_;  // Hermite nodes scaled to variance
    double sqrt_t_;
};

}  // namespace basslv
