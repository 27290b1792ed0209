#include "basslv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "basslv/numeric/normal.hpp"
#include "basslv/numeric/quadrature.hpp"

namespace basslv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMergeRelTol = 1e-12;
constexpr double kWeightSumTol = 1e-12;
}  // namespace

bool SupportInterval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.empty() || atoms.size() != weights.size())
        throw std::invalid_argument("DiscreteMeasure: atoms/weights size mismatch or empty");
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

    double scale = 0.0;
    for (double x : atoms) scale = std::max(scale, std::fabs(x));
    const double merge_tol = kMergeRelTol * std::max(1.0, scale);

    double wsum = 0.0;
    for (std::size_t idx : order) {
        const double x = atoms[idx];
        const double w = weights[idx];
        if (!std::isfinite(x)) throw std::invalid_argument("DiscreteMeasure: non-finite atom");
        if (!(w > 0.0)) throw std::invalid_argument("DiscreteMeasure: weights must be > 0");
        wsum += w;
        if (!atoms_.empty() && x - atoms_.back() <= merge_tol) {
            // merge colliding atoms, weight-averaged position
            const double wtot = weights_.back() + w;
            atoms_.back() = (atoms_.back() * weights_.back() + x * w) / wtot;
            weights_.back() = wtot;
        } else {
            atoms_.push_back(x);
            weights_.push_back(w);
        }
    }
    if (std::fabs(wsum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("DiscreteMeasure: weights must sum to 1 within 1e-12");

    cum_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        acc += weights_[j];
        cum_[j] = acc;
    }
    cum_.back() = 1.0;
}

DiscreteMeasure DiscreteMeasure::equal_weights(std::vector<double> atoms) {
    std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    return DiscreteMeasure(std::move(atoms), std::move(w));
}

double DiscreteMeasure::mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) m += atoms_[j] * weights_[j];
    return m;
}

double DiscreteMeasure::cdf(double x) const {
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
    if (it == atoms_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteMeasure::cdf_left(double x) const {
    const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
    if (it == atoms_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteMeasure::quantile(double u) const {
    if (!(u > 0.0 && u <= 1.0)) {
        if (u == 0.0) return atoms_.front();
        throw std::domain_error("DiscreteMeasure::quantile: u outside (0,1]");
    }
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    return atoms_[std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()),
                                        atoms_.size() - 1)];
}

double DiscreteMeasure::call(double x) const {
    double acc = 0.0;
    for (std::size_t j = atoms_.size(); j-- > 0;) {
        if (atoms_[j] <= x) break;
        acc += weights_[j] * (atoms_[j] - x);
    }
    return acc;
}

double DiscreteMeasure::potential(double x) const { return 2.0 * call(x) + x - mean(); }

DiscreteMeasure DiscreteMeasure::shifted(double c) const {
    std::vector<double> a = atoms_;
    for (double& x : a) x += c;
    return DiscreteMeasure(std::move(a), weights_);
}

DiscreteMeasure DiscreteMeasure::scaled(double s) const {
    if (!(s > 0.0)) throw std::invalid_argument("DiscreteMeasure::scaled: factor must be > 0");
    std::vector<double> a = atoms_;
    for (double& x : a) x *= s;
    return DiscreteMeasure(std::move(a), weights_);
}

DiscreteMeasure DiscreteMeasure::with_atoms(std::vector<double> atoms) const {
    return DiscreteMeasure(std::move(atoms), weights_);
}

// ---------------------------------------------------------------------------
// SimpleDist

SimpleDist::SimpleDist(Params p) : p_(std::move(p)) {
    if (const auto* u = std::get_if<UniformParams>(&p_)) {
        if (!(u->lo < u->hi)) throw std::invalid_argument("uniform: lo < hi required");
    } else if (const auto* t = std::get_if<TruncNormalParams>(&p_)) {
        if (!(t->stdev > 0.0) || !(t->lo < t->hi))
            throw std::invalid_argument("trunc_normal: stdev > 0 and lo < hi required");
        phi_lo_ = norm_cdf((t->lo - t->mean) / t->stdev);
        phi_norm_ = norm_cdf((t->hi - t->mean) / t->stdev) - phi_lo_;
        if (!(phi_norm_ > 0.0))
            throw std::invalid_argument("trunc_normal: window has zero mass");
    } else if (const auto* n = std::get_if<NormalParams>(&p_)) {
        if (!(n->stdev > 0.0)) throw std::invalid_argument("normal: stdev > 0 required");
    } else if (const auto* l = std::get_if<LogisticParams>(&p_)) {
        if (!(l->scale > 0.0)) throw std::invalid_argument("logistic: scale > 0 required");
    }
}

double SimpleDist::cdf(double x) const {
    if (const auto* u = std::get_if<UniformParams>(&p_)) {
        return std::clamp((x - u->lo) / (u->hi - u->lo), 0.0, 1.0);
    }
    if (const auto* t = std::get_if<TruncNormalParams>(&p_)) {
        if (x <= t->lo) return 0.0;
        if (x >= t->hi) return 1.0;
        return (norm_cdf((x - t->mean) / t->stdev) - phi_lo_) / phi_norm_;
    }
    if (const auto* n = std::get_if<NormalParams>(&p_)) return norm_cdf((x - n->mean) / n->stdev);
    if (const auto* l = std::get_if<LogisticParams>(&p_))
        return 1.0 / (1.0 + std::exp(-(x - l->location) / l->scale));
    const auto& pm = std::get<PointMassParams>(p_);
    return x >= pm.location ? 1.0 : 0.0;
}

double SimpleDist::pdf(double x) const {
    if (const auto* u = std::get_if<UniformParams>(&p_)) {
        return (x >= u->lo && x <= u->hi) ? 1.0 / (u->hi - u->lo) : 0.0;
    }
    if (const auto* t = std::get_if<TruncNormalParams>(&p_)) {
        if (x < t->lo || x > t->hi) return 0.0;
        return norm_pdf((x - t->mean) / t->stdev) / (t->stdev * phi_norm_);
    }
    if (const auto* n = std::get_if<NormalParams>(&p_))
        return norm_pdf((x - n->mean) / n->stdev) / n->stdev;
    if (const auto* l = std::get_if<LogisticParams>(&p_)) {
        const double e = std::exp(-std::fabs(x - l->location) / l->scale);
        return e / (l->scale * (1.0 + e) * (1.0 + e));
    }
    return 0.0;  // point mass: no density
}

double SimpleDist::quantile(double u) const {
    if (const auto* uf = std::get_if<UniformParams>(&p_)) return uf->lo + (uf->hi - uf->lo) * u;
    if (const auto* t = std::get_if<TruncNormalParams>(&p_)) {
        if (u <= 0.0) return t->lo;
        if (u >= 1.0) return t->hi;
        return t->mean + t->stdev * norm_ppf(phi_lo_ + u * phi_norm_);
    }
    if (const auto* n = std::get_if<NormalParams>(&p_)) return n->mean + n->stdev * norm_ppf(u);
    if (const auto* l = std::get_if<LogisticParams>(&p_)) {
        if (u <= 0.0) return -kInf;
        if (u >= 1.0) return kInf;
        return l->location + l->scale * std::log(u / (1.0 - u));
    }
    return std::get<PointMassParams>(p_).location;
}

double SimpleDist::mean() const {
    if (const auto* u = std::get_if<UniformParams>(&p_)) return 0.5 * (u->lo + u->hi);
    if (const auto* t = std::get_if<TruncNormalParams>(&p_)) {
        const double a = (t->lo - t->mean) / t->stdev, b = (t->hi - t->mean) / t->stdev;
        return t->mean + t->stdev * (norm_pdf(a) - norm_pdf(b)) / phi_norm_;
    }
    if (const auto* n = std::get_if<NormalParams>(&p_)) return n->mean;
    if (const auto* l = std::get_if<LogisticParams>(&p_)) return l->location;
    return std::get<PointMassParams>(p_).location;
}

double SimpleDist::call(double x) const {
    if (const auto* u = std::get_if<UniformParams>(&p_)) {
        if (x <= u->lo) return mean() - x;
        if (x >= u->hi) return 0.0;
        const double d = u->hi - x;
        return 0.5 * d * d / (u->hi - u->lo);
    }
    if (const auto* t = std::get_if<TruncNormalParams>(&p_)) {
        if (x <= t->lo) return mean() - x;
        if (x >= t->hi) return 0.0;
        const double xt = (x - t->mean) / t->stdev, bt = (t->hi - t->mean) / t->stdev;
        return ((t->mean - x) * (norm_cdf(bt) - norm_cdf(xt)) +
                t->stdev * (norm_pdf(xt) - norm_pdf(bt))) /
               phi_norm_;
    }
    if (const auto* n = std::get_if<NormalParams>(&p_)) {
        const double z = (x - n->mean) / n->stdev;
        return n->stdev * (norm_pdf(z) - z * (1.0 - norm_cdf(z)));
    }
    if (const auto* l = std::get_if<LogisticParams>(&p_)) {
        const double z = (x - l->location) / l->scale;
        // s*log(1+exp(-z)), stable for both signs of z
        return l->scale * (z > 0.0 ? std::log1p(std::exp(-z)) : std::log1p(std::exp(z)) - z);
    }
    return std::max(std::get<PointMassParams>(p_).location - x, 0.0);
}

SupportInterval SimpleDist::support() const {
    if (const auto* u = std::get_if<UniformParams>(&p_)) return {u->lo, u->hi};
    if (const auto* t = std::get_if<TruncNormalParams>(&p_)) return {t->lo, t->hi};
    if (std::get_if<NormalParams>(&p_) || std::get_if<LogisticParams>(&p_)) return {-kInf, kInf};
    const double c = std::get<PointMassParams>(p_).location;
    return {c, c};
}

double SimpleDist::integrate_quantile(double u0, double u1) const {
    if (const auto* u = std::get_if<UniformParams>(&p_))
        return u->lo * (u1 - u0) + 0.5 * (u->hi - u->lo) * (u1 * u1 - u0 * u0);
    if (const auto* t = std::get_if<TruncNormalParams>(&p_)) {
        const double v0 = phi_lo_ + u0 * phi_norm_, v1 = phi_lo_ + u1 * phi_norm_;
        const double g0 = (v0 <= 0.0 || v0 >= 1.0) ? 0.0 : norm_pdf(norm_ppf(v0));
        const double g1 = (v1 <= 0.0 || v1 >= 1.0) ? 0.0 : norm_pdf(norm_ppf(v1));
        return t->mean * (u1 - u0) + t->stdev * (g0 - g1) / phi_norm_;
    }
    if (const auto* n = std::get_if<NormalParams>(&p_)) {
        const double g0 = (u0 <= 0.0) ? 0.0 : norm_pdf(norm_ppf(u0));
        const double g1 = (u1 >= 1.0) ? 0.0 : norm_pdf(norm_ppf(u1));
        return n->mean * (u1 - u0) + n->stdev * (g0 - g1);
    }
    if (const auto* l = std::get_if<LogisticParams>(&p_)) {
        auto ent = [](double u) {
            double acc = 0.0;
            if (u > 0.0) acc += u * std::log(u);
            if (u < 1.0) acc += (1.0 - u) * std::log1p(-u);
            return acc;
        };
        return l->location * (u1 - u0) + l->scale * (ent(u1) - ent(u0));
    }
    return std::get<PointMassParams>(p_).location * (u1 - u0);
}

// ---------------------------------------------------------------------------
// AnalyticDistribution

AnalyticDistribution::AnalyticDistribution(std::vector<SimpleDist> comps,
                                           std::vector<double> weights)
    : comps_(std::move(comps)), weights_(std::move(weights)) {
    if (comps_.empty() || comps_.size() != weights_.size())
        throw std::invalid_argument("mixture: component/weight size mismatch or empty");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw std::invalid_argument("mixture: weights must be > 0");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("mixture: weights must sum to 1");
}

AnalyticDistribution AnalyticDistribution::uniform(double lo, double hi) {
    return AnalyticDistribution({SimpleDist(UniformParams{lo, hi})}, {1.0});
}
AnalyticDistribution AnalyticDistribution::trunc_normal(double mean, double stdev, double lo,
                                                        double hi) {
    return AnalyticDistribution({SimpleDist(TruncNormalParams{mean, stdev, lo, hi})}, {1.0});
}
AnalyticDistribution AnalyticDistribution::normal(double mean, double stdev) {
    return AnalyticDistribution({SimpleDist(NormalParams{mean, stdev})}, {1.0});
}
AnalyticDistribution AnalyticDistribution::logistic(double location, double scale) {
    return AnalyticDistribution({SimpleDist(LogisticParams{location, scale})}, {1.0});
}
AnalyticDistribution AnalyticDistribution::point_mass(double location) {
    return AnalyticDistribution({SimpleDist(PointMassParams{location})}, {1.0});
}

AnalyticDistribution AnalyticDistribution::mixture(std::vector<AnalyticDistribution> components,
                                                   std::vector<double> weights) {
    if (components.size() != weights.size())
        throw std::invalid_argument("mixture: component/weight size mismatch");
    std::vector<SimpleDist> flat;
    std::vector<double> flat_w;
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (std::size_t j = 0; j < components[i].comps_.size(); ++j) {
            flat.push_back(components[i].comps_[j]);
            flat_w.push_back(weights[i] * components[i].weights_[j]);
        }
    }
    return AnalyticDistribution(std::move(flat), std::move(flat_w));
}

double AnalyticDistribution::cdf(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) acc += weights_[i] * comps_[i].cdf(x);
    return acc;
}

double AnalyticDistribution::pdf(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) acc += weights_[i] * comps_[i].pdf(x);
    return acc;
}

double AnalyticDistribution::pdf_left(double x) const {
    // left limit: nudge below density jump points (uniform edges)
    const double eps = 1e-12 * std::max(1.0, std::fabs(x));
    return pdf(x - eps);
}

double AnalyticDistribution::quantile(double u) const {
    if (is_simple()) return comps_[0].quantile(u);
    if (!(u > 0.0 && u < 1.0)) {
        if (u == 0.0) return support().lo;
        if (u == 1.0) return support().hi;
        throw std::domain_error("quantile: u outside [0,1]");
    }
    // bracket
    SupportInterval s = support();
    double lo = s.lo, hi = s.hi;
    if (!std::isfinite(lo)) {
        lo = mean() - 1.0;
        while (cdf(lo) > u) lo = mean() + 2.0 * (lo - mean());
    }
    if (!std::isfinite(hi)) {
        hi = mean() + 1.0;
        while (cdf(hi) < u) hi = mean() + 2.0 * (hi - mean());
    }
    // bisection with Newton acceleration on F(x) - u
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = cdf(x) - u;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double d = pdf(x);
        double xn = (d > 0.0) ? x - f / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-15 * std::max(1.0, std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

double AnalyticDistribution::quantile_derivative(double u) const {
    const double q = quantile(u);
    const double d = pdf_left(q);
    if (!(d > 0.0))
        throw std::domain_error("quantile_derivative: density vanishes at the quantile");
    return 1.0 / d;
}

double AnalyticDistribution::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) acc += weights_[i] * comps_[i].mean();
    return acc;
}

double AnalyticDistribution::call(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) acc += weights_[i] * comps_[i].call(x);
    return acc;
}

double AnalyticDistribution::potential(double x) const { return 2.0 * call(x) + x - mean(); }

SupportInterval AnalyticDistribution::support() const {
    double lo = kInf, hi = -kInf;
    for (const auto& c : comps_) {
        const SupportInterval s = c.support();
        lo = std::min(lo, s.lo);
        hi = std::max(hi, s.hi);
    }
    return {lo, hi};
}

double AnalyticDistribution::integrate_quantile(double u0, double u1) const {
    if (u0 > u1) throw std::invalid_argument("integrate_quantile: u0 > u1");
    if (is_simple()) return comps_[0].integrate_quantile(u0, u1);
    // split at quantile kinks, Gauss-Legendre on the smooth pieces
    std::vector<double> cuts{u0, u1};
    for (double k : quantile_kinks())
        if (k > u0 && k < u1) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-15) continue;
        acc += integrate_gl([this](double u) { return quantile(u); }, cuts[i], cuts[i + 1], 16);
    }
    return acc;
}

std::vector<double> AnalyticDistribution::quantile_kinks() const {
    if (is_simple()) return {};
    std::vector<double> out;
    for (const auto& c : comps_) {
        const SupportInterval s = c.support();
        for (double edge : {s.lo, s.hi}) {
            if (!std::isfinite(edge)) continue;
            const double u = cdf(edge);
            if (u > 0.0 && u < 1.0) out.push_back(u);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> AnalyticDistribution::breakpoints() const {
    std::vector<double> out;
    for (const auto& c : comps_) {
        const SupportInterval s = c.support();
        if (std::isfinite(s.lo)) out.push_back(s.lo);
        if (std::isfinite(s.hi)) out.push_back(s.hi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double AnalyticDistribution::density_floor(int n) const {
    const SupportInterval s = support();
    if (!s.bounded()) return 0.0;
    double floor = kInf;
    for (int k = 0; k < n; ++k) {
        const double x = s.lo + (s.hi - s.lo) * (k + 0.5) / n;
        floor = std::min(floor, pdf(x));
    }
    // edges, nudged inward
    const double eps = 1e-9 * std::max(1.0, s.length());
    floor = std::min({floor, pdf(s.lo + eps), pdf(s.hi - eps)});
    return floor;
}

bool AnalyticDistribution::admissible_target(int grid, double floor) const {
    if (!compact()) return false;
    for (const auto& c : comps_)
        if (c.is_point_mass()) return false;
    return density_floor(grid) > floor;
}

// ---------------------------------------------------------------------------
// Measure

double Measure::cdf(double x) const {
    return is_discrete() ? discrete().cdf(x) : analytic().cdf(x);
}
double Measure::cdf_left(double x) const {
    return is_discrete() ? discrete().cdf_left(x) : analytic().cdf(x);
}
double Measure::quantile(double u) const {
    return is_discrete() ? discrete().quantile(u) : analytic().quantile(u);
}
double Measure::mean() const { return is_discrete() ? discrete().mean() : analytic().mean(); }
double Measure::call(double x) const {
    return is_discrete() ? discrete().call(x) : analytic().call(x);
}
double Measure::potential(double x) const {
    return is_discrete() ? discrete().potential(x) : analytic().potential(x);
}
SupportInterval Measure::support() const {
    return is_discrete() ? discrete().support() : analytic().support();
}

double Measure::integrate_quantile(double u0, double u1) const {
    if (!is_discrete()) return analytic().integrate_quantile(u0, u1);
    const DiscreteMeasure& m = discrete();
    const auto& cum = m.cum_weights();
    double acc = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < cum.size(); ++j) {
        const double a = std::max(prev, u0), b = std::min(cum[j], u1);
        if (b > a) acc += m.atoms()[j] * (b - a);
        prev = cum[j];
        if (prev >= u1) break;
    }
    return acc;
}

std::vector<double> Measure::breakpoints() const {
    if (is_discrete()) return discrete().atoms();
    return analytic().breakpoints();
}

std::vector<double> Measure::quantile_kinks() const {
    if (is_discrete()) {
        const auto& cum = discrete().cum_weights();
        return {cum.begin(), cum.end() - 1};
    }
    return analytic().quantile_kinks();
}

PotentialFunction::PotentialFunction(Measure xi)
    : xi_(std::move(xi)), breaks_(xi_.breakpoints()), mean_(xi_.mean()) {}

// ---------------------------------------------------------------------------
// QuantileGrid

QuantileGrid::QuantileGrid(std::vector<double> values, Interp interp)
    : values_(std::move(values)), interp_(interp) {
    if (values_.empty()) throw std::invalid_argument("QuantileGrid: empty");
    for (std::size_t k = 0; k + 1 < values_.size(); ++k)
        if (values_[k] > values_[k + 1] + 1e-12 * std::max(1.0, std::fabs(values_[k])))
            throw std::invalid_argument("QuantileGrid: values must be nondecreasing");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("QuantileGrid: non-finite value");
}

QuantileGrid QuantileGrid::sample(const Measure& m, int grid_size, Interp interp) {
    if (grid_size < 1) throw std::invalid_argument("QuantileGrid::sample: size >= 1");
    std::vector<double> v(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k)
        v[static_cast<std::size_t>(k)] = m.quantile((k + 0.5) / grid_size);
    return QuantileGrid(std::move(v), interp);
}

double QuantileGrid::quantile(double u) const {
    const int m = size();
    if (interp_ == Interp::step) {
        int k = static_cast<int>(std::floor(u * m));
        k = std::clamp(k, 0, m - 1);
        return values_[static_cast<std::size_t>(k)];
    }
    const double pos = u * m - 0.5;
    if (pos <= 0.0) return values_.front();
    if (pos >= m - 1) return values_.back();
    const int k = static_cast<int>(std::floor(pos));
    const double t = pos - k;
    return values_[static_cast<std::size_t>(k)] * (1.0 - t) +
           values_[static_cast<std::size_t>(k) + 1] * t;
}

double QuantileGrid::cdf(double x) const {
    const int m = size();
    if (interp_ == Interp::step) {
        const auto it = std::upper_bound(values_.begin(), values_.end(), x);
        return static_cast<double>(it - values_.begin()) / m;
    }
    if (x <= values_.front()) return x < values_.front() ? 0.0 : 0.5 / m;
    if (x >= values_.back()) return x > values_.back() ? 1.0 : 1.0 - 0.5 / m;
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - values_.begin()) - 1;
    const double v0 = values_[k], v1 = values_[k + 1];
    const double t = (v1 > v0) ? (x - v0) / (v1 - v0) : 0.0;
    return (static_cast<double>(k) + 0.5 + t) / m;
}

DiscreteMeasure QuantileGrid::as_discrete() const { return DiscreteMeasure::equal_weights(values_); }

// ---------------------------------------------------------------------------
// quantize

DiscreteMeasure quantize(const Measure& m, int n) {
    if (n < 1) throw std::invalid_argument("quantize: n >= 1 required");
    const double lo_q = m.quantile(1e-12), hi_q = m.quantile(1.0 - 1e-12);
    if (!std::isfinite(lo_q) || !std::isfinite(hi_q))
        throw std::domain_error("quantize: quantile function is not integrable");
    std::vector<double> atoms(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u0 = static_cast<double>(i) / n, u1 = static_cast<double>(i + 1) / n;
        atoms[static_cast<std::size_t>(i)] = n * m.integrate_quantile(u0, u1);
    }
    std::vector<double> w(static_cast<std::size_t>(n), 1.0 / n);
    return DiscreteMeasure(std::move(atoms), std::move(w));
}

DiscreteMeasure quantize(const AnalyticDistribution& d, int n) { return quantize(Measure(d), n); }

// ---------------------------------------------------------------------------
// potential comparison grid

namespace {

std::vector<double> comparison_grid(const Measure& a, const Measure& b, const MeasureTols& tols) {
    const SupportInterval sa = a.support(), sb = b.support();
    if (!sa.bounded() || !sb.bounded())
        throw std::domain_error("potential comparison requires compact supports");
    const double lo = std::min(sa.lo, sb.lo), hi = std::max(sa.hi, sb.hi);
    std::vector<double> g;
    for (const Measure* m : {&a, &b})
        for (double x : m->breakpoints())
            if (x >= lo && x <= hi) g.push_back(x);
    g.push_back(lo);
    g.push_back(hi);
    const int fill = std::max(2, tols.fill_points);
    for (int k = 0; k <= fill; ++k) g.push_back(lo + (hi - lo) * k / fill);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

// interior minimum of f on [a, b] by golden-section (f smooth between grid
// breakpoints); returns {argmin, min}
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-13 * std::max(1.0, std::fabs(a) + std::fabs(b));
         ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

bool convex_order_leq(const Measure& mu, const Measure& nu, double tol, const MeasureTols& tols) {
    if (std::fabs(mu.mean() - nu.mean()) > tol * std::max(1.0, std::fabs(nu.mean()))) return false;
    const auto grid = comparison_grid(mu, nu, tols);
    for (double x : grid)
        if (mu.potential(x) > nu.potential(x) + tol) return false;
    return true;
}

std::vector<IrreducibleComponent> irreducible_components(const Measure& mu, const Measure& nu,
                                                         const MeasureTols& tols) {
    if (!convex_order_leq(mu, nu, tols.convex_order_tol, tols))
        throw std::domain_error("irreducible_components: inputs are not in convex order");
    auto d = [&](double x) { return nu.potential(x) - mu.potential(x); };
    const auto grid = comparison_grid(mu, nu, tols);
    const double strict = tols.strict_tol;

    // collect "contact" points: grid points and interior gap minima with d ~ 0
    struct Node {
        double x;
        bool zero;
    };
    std::vector<Node> nodes;
    nodes.reserve(grid.size() * 2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        nodes.push_back({grid[i], d(grid[i]) <= strict});
        if (i + 1 < grid.size()) {
            const auto [xm, fm] = golden_min(d, grid[i], grid[i + 1]);
            if (fm <= strict) nodes.push_back({xm, true});
        }
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.x < b.x; });

    std::vector<IrreducibleComponent> out;
    std::optional<double> open_lo;
    double left_zero = nodes.front().x;
    bool has_positive = false;
    auto close_component = [&](double lo, double hi) {
        IrreducibleComponent c;
        c.lo = lo;
        c.hi = hi;
        c.mu_mass = mu.cdf_left(hi) - mu.cdf(lo);
        c.nu_mass = nu.cdf_left(hi) - nu.cdf(lo);
        out.push_back(c);
    };
    for (const Node& nd : nodes) {
        if (nd.zero) {
            if (open_lo && has_positive) close_component(*open_lo, nd.x);
            open_lo.reset();
            has_positive = false;
            left_zero = nd.x;
        } else {
            if (!open_lo) open_lo = left_zero;
            has_positive = true;
        }
    }
    if (open_lo && has_positive) close_component(*open_lo, nodes.back().x);
    return out;
}

bool is_irreducible(const Measure& mu, const Measure& nu, const MeasureTols& tols) {
    const auto comps = irreducible_components(mu, nu, tols);
    if (comps.size() != 1) return false;
    const SupportInterval s = mu.support();
    return comps[0].lo <= s.lo && s.hi <= comps[0].hi &&
           comps[0].mu_mass >= 1.0 - 1e-9;
}

// ---------------------------------------------------------------------------
// Wasserstein distances

namespace {

// merged u-breakpoints of two quantile functions; evaluation happens on
// open cells between consecutive breakpoints
std::vector<double> merged_u_grid(const Measure& a, const Measure& b, int fill) {
    std::vector<double> u{0.0, 1.0};
    for (const Measure* m : {&a, &b})
        for (double k : m->quantile_kinks()) u.push_back(k);
    const bool both_discrete = a.is_discrete() && b.is_discrete();
    if (!both_discrete) {
        for (int k = 1; k < fill; ++k) u.push_back(static_cast<double>(k) / fill);
    }
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

void require_compact(const Measure& m, const char* who) {
    if (!m.compact()) throw std::domain_error(std::string(who) + ": unbounded support");
}

}  // namespace

double w_infinity(const Measure& a, const Measure& b, const MeasureTols& tols) {
    require_compact(a, "w_infinity");
    require_compact(b, "w_infinity");
    const auto u = merged_u_grid(a, b, tols.quantile_grid);
    double sup = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double mid = 0.5 * (u[i] + u[i + 1]);
        sup = std::max(sup, std::fabs(a.quantile(mid) - b.quantile(mid)));
        // near-edge probes catch steep analytic quantiles
        const double lo = u[i] + 1e-9 * (u[i + 1] - u[i]);
        const double hi = u[i + 1] - 1e-9 * (u[i + 1] - u[i]);
        sup = std::max({sup, std::fabs(a.quantile(lo) - b.quantile(lo)),
                        std::fabs(a.quantile(hi) - b.quantile(hi))});
    }
    return sup;
}

ShiftedDistance w_infinity_mod_shift(const Measure& a, const Measure& b,
                                     const MeasureTols& tols) {
    require_compact(a, "w_infinity_mod_shift");
    require_compact(b, "w_infinity_mod_shift");
    const auto u = merged_u_grid(a, b, tols.quantile_grid);
    double dmin = kInf, dmax = -kInf;
    auto probe = [&](double uu) {
        const double d = a.quantile(uu) - b.quantile(uu);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    };
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        probe(0.5 * (u[i] + u[i + 1]));
        probe(u[i] + 1e-9 * (u[i + 1] - u[i]));
        probe(u[i + 1] - 1e-9 * (u[i + 1] - u[i]));
    }
    // shift c with a ~= b shifted by c: half-range of Q_a - Q_b
    return {0.5 * (dmax - dmin), 0.5 * (dmax + dmin)};
}

double w1(const Measure& a, const Measure& b, const MeasureTols& tols) {
    require_compact(a, "w1");
    require_compact(b, "w1");
    const auto u = merged_u_grid(a, b, tols.quantile_grid);
    auto diff = [&](double uu) { return a.quantile(uu) - b.quantile(uu); };
    const bool both_discrete = a.is_discrete() && b.is_discrete();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double u0 = u[i], u1 = u[i + 1];
        if (u1 - u0 < 1e-15) continue;
        if (both_discrete) {
            acc += std::fabs(diff(0.5 * (u0 + u1))) * (u1 - u0);
            continue;
        }
        const double eps = 1e-9 * (u1 - u0);
        const double dl = diff(u0 + eps), dr = diff(u1 - eps);
        if (dl * dr >= 0.0) {
            acc += std::fabs(integrate_gl([&](double uu) { return diff(uu); }, u0, u1, 8));
        } else {
            // sign change: locate the root, integrate the two lobes
            double lo = u0 + eps, hi = u1 - eps;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((diff(mid) > 0.0) == (dl > 0.0) ? lo : hi) = mid;
            }
            const double r = 0.5 * (lo + hi);
            acc += std::fabs(integrate_gl([&](double uu) { return diff(uu); }, u0, r, 8));
            acc += std::fabs(integrate_gl([&](double uu) { return diff(uu); }, r, u1, 8));
        }
    }
    return acc;
}

double ks_distance(std::span<const double> sorted_sample, const Measure& ref) {
    const std::size_t n = sorted_sample.size();
    if (n == 0) throw std::invalid_argument("ks_distance: empty sample");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (sorted_sample[i] > sorted_sample[i + 1])
            throw std::invalid_argument("ks_distance: sample must be sorted");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = ref.cdf(sorted_sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

}  // namespace basslv
