#include "basslv/gauss_kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "basslv/numeric/normal.hpp"
#include "basslv/numeric/quadrature.hpp"

namespace basslv {

HeatKernel::HeatKernel(double t) : variance(t) {
    if (!(t > 0.0)) throw std::domain_error("HeatKernel: variance must be > 0");
}
double HeatKernel::pdf(double x) const { return gauss_pdf(x, variance); }
double HeatKernel::cdf(double x) const { return gauss_cdf(x, variance); }

double phi_convolve_cdf(const DiscreteMeasure& F, double t, double x) {
    if (!(t > 0.0)) throw std::domain_error("phi_convolve_cdf: variance must be > 0");
    const double s = std::sqrt(t);
    double acc = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j)
        acc += F.weights()[j] * norm_cdf((x - F.atoms()[j]) / s);
    return acc;
}

double phi_convolve_cdf(const QuantileGrid& F, double t, double x) {
    if (!(t > 0.0)) throw std::domain_error("phi_convolve_cdf: variance must be > 0");
    const double s = std::sqrt(t);
    const int m = F.size();
    if (F.interp() == QuantileGrid::Interp::step) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += norm_cdf((x - F.values()[static_cast<std::size_t>(k)]) / s);
        return acc / m;
    }
    // linear interpolation between midpoints, flat on the two end half-cells;
    // per cell the integral of Phi((x - Q(y))/s) dy is closed form via
    // G(z) = z Phi(z) + phi(z).
    auto G = [](double z) { return z * norm_cdf(z) + norm_pdf(z); };
    const auto& v = F.values();
    double acc = 0.0;
    const double h = 1.0 / m;
    acc += 0.5 * h * norm_cdf((x - v.front()) / s);
    acc += 0.5 * h * norm_cdf((x - v.back()) / s);
    for (int k = 0; k + 1 < m; ++k) {
        const double q0 = v[static_cast<std::size_t>(k)], q1 = v[static_cast<std::size_t>(k) + 1];
        if (q1 - q0 < 1e-14 * std::max(1.0, std::fabs(q0))) {
            acc += h * norm_cdf((x - q0) / s);
        } else {
            const double z0 = (x - q0) / s, z1 = (x - q1) / s;
            acc += h * s * (G(z0) - G(z1)) / (q1 - q0);
        }
    }
    return acc;
}

double phi_convolve_cdf(const Measure& F, double t, double x) {
    if (F.is_discrete()) return phi_convolve_cdf(F.discrete(), t, x);
    if (!(t > 0.0)) throw std::domain_error("phi_convolve_cdf: variance must be > 0");
    // analytic law: integral Phi_t(x - Q(y)) dy via fixed-order quadrature
    const double s = std::sqrt(t);
    return integrate_gl([&](double u) { return norm_cdf((x - F.quantile(u)) / s); }, 0.0, 1.0, 64);
}

// ---------------------------------------------------------------------------
// SMap

namespace {

DiscreteMeasure grid_to_discrete(const QuantileGrid& g) { return g.as_discrete(); }

void check_target(const AnalyticDistribution& target) {
    if (!target.admissible_target())
        throw std::domain_error(
            "SMap: target law must be absolutely continuous with compact support and "
            "density bounded away from zero");
}

}  // namespace

SMap::SMap(DiscreteMeasure reference, AnalyticDistribution target, double variance,
           QuadratureSpec quad)
    : reference_(std::move(reference)),
      target_(std::move(target)),
      variance_(variance),
      quad_(quad) {
    if (!(variance_ > 0.0)) throw std::domain_error("SMap: variance must be > 0");
    check_target(target_);
    const QuadratureRule& r = gauss_hermite_prob(quad_.hermite_order);
    sqrt_t_ = std::sqrt(variance_);
    z_nodes_.resize(r.nodes.size());
    z_weights_ = r.weights;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) z_nodes_[i] = sqrt_t_ * r.nodes[i];
}

SMap::SMap(const QuantileGrid& reference, AnalyticDistribution target, double variance,
           QuadratureSpec quad)
    : SMap(grid_to_discrete(reference), std::move(target), variance, quad) {}

double SMap::inner_cdf(double x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < reference_.size(); ++j)
        acc += reference_.weights()[j] * norm_cdf((x - reference_.atoms()[j]) / sqrt_t_);
    return acc;
}

double SMap::inner_pdf(double x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < reference_.size(); ++j)
        acc += reference_.weights()[j] * norm_pdf((x - reference_.atoms()[j]) / sqrt_t_);
    return acc / sqrt_t_;
}

double SMap::eval(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < z_nodes_.size(); ++i) {
        const double v = inner_cdf(x - z_nodes_[i]);
        acc += z_weights_[i] * target_.quantile(v);
    }
    if (!std::isfinite(acc)) throw std::runtime_error("SMap::eval: non-finite quadrature");
    return acc;
}

double SMap::derivative(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < z_nodes_.size(); ++i) {
        const double xi = x - z_nodes_[i];
        const double v = inner_cdf(xi);
        acc += z_weights_[i] * target_.quantile_derivative(v) * inner_pdf(xi);
    }
    return acc;
}

double SMap::t_kernel(double x, double y) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < z_nodes_.size(); ++i) {
        const double xi = x - z_nodes_[i];
        const double v = inner_cdf(xi);
        acc += z_weights_[i] * target_.quantile_derivative(v) *
               norm_pdf((x - y - z_nodes_[i]) / sqrt_t_) / sqrt_t_;
    }
    return acc;
}

SupportInterval SMap::range() const { return target_.support(); }

double SMap::invert(double target, std::optional<double> hint) const {
    const SupportInterval r = range();
    if (!(target > r.lo && target < r.hi))
        throw std::range_error("SMap::invert: target outside the open range of S");

    const double rtol = quad_.invert_rtol * (1.0 + std::fabs(target));

    // expand a bracket geometrically around the hint (or the reference mean)
    double x0 = hint.value_or(reference_.mean());
    double f0 = eval(x0) - target;
    double step = std::max(1.0, 0.1 * (reference_.support().length() + 1.0)) * sqrt_t_;
    double lo = x0, hi = x0, flo = f0, fhi = f0;
    for (int it = 0; flo > 0.0 && it < 200; ++it) {
        lo -= step;
        flo = eval(lo) - target;
        step *= 2.0;
    }
    step = std::max(1.0, 0.1 * (reference_.support().length() + 1.0)) * sqrt_t_;
    for (int it = 0; fhi < 0.0 && it < 200; ++it) {
        hi += step;
        fhi = eval(hi) - target;
        step *= 2.0;
    }
    if (flo > 0.0 || fhi < 0.0)
        throw std::range_error("SMap::invert: failed to bracket the target value");

    // safeguarded Newton: accept the Newton step only inside the bracket
    double x = std::clamp(x0, lo, hi);
    double f = eval(x) - target;
    for (int it = 0; it < quad_.invert_max_iter; ++it) {
        if (std::fabs(f) <= rtol) return x;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double d = derivative(x);
        double xn = (d > 0.0) ? x - f / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
        f = eval(x) - target;
    }
    if (std::fabs(f) <= rtol) return x;
    throw std::runtime_error("SMap::invert: root find did not reach tolerance");
}

}  // namespace basslv
