#include "basslv/fixedpoint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "basslv/errors.hpp"
#include "basslv/numeric/format.hpp"
#include "basslv/numeric/parallel.hpp"

#include <json.hpp>

namespace basslv {

namespace {

AnalyticDistribution scale_analytic(const AnalyticDistribution& d, double c) {
    std::vector<AnalyticDistribution> comps;
    std::vector<double> w = d.component_weights();
    for (const SimpleDist& s : d.components()) {
        if (const auto* u = std::get_if<UniformParams>(&s.params()))
            comps.push_back(AnalyticDistribution::uniform(c * u->lo, c * u->hi));
        else if (const auto* t = std::get_if<TruncNormalParams>(&s.params()))
            comps.push_back(AnalyticDistribution::trunc_normal(c * t->mean, c * t->stdev,
                                                               c * t->lo, c * t->hi));
        else if (const auto* n = std::get_if<NormalParams>(&s.params()))
            comps.push_back(AnalyticDistribution::normal(c * n->mean, c * n->stdev));
        else if (const auto* l = std::get_if<LogisticParams>(&s.params()))
            comps.push_back(AnalyticDistribution::logistic(c * l->location, c * l->scale));
        else
            comps.push_back(AnalyticDistribution::point_mass(
                c * std::get<PointMassParams>(s.params()).location));
    }
    return AnalyticDistribution::mixture(std::move(comps), std::move(w));
}

DiscreteMeasure gauge_zero_mean(const DiscreteMeasure& m, double* applied_shift = nullptr) {
    const double c = m.mean();
    if (applied_shift) *applied_shift = -c;
    return m.shifted(-c);
}

}  // namespace

FixedPointProblem::FixedPointProblem(DiscreteMeasure mu, AnalyticDistribution nu, double variance,
                                     SolverConfig config)
    : mu_(std::move(mu)), nu_(std::move(nu)), variance_(variance), config_(std::move(config)) {
    if (!(variance_ > 0.0))
        throw AssumptionViolation("FixedPointProblem: variance must be > 0");
    if (!nu_.admissible_target())
        throw AssumptionViolation(
            "FixedPointProblem: target law must be absolutely continuous with compact "
            "support and density bounded away from zero");
    const SupportInterval hull = nu_.support();
    for (double x : mu_.atoms())
        if (!(x > hull.lo && x < hull.hi))
            throw AssumptionViolation(
                "FixedPointProblem: supp(mu) must lie in the interior of the target hull");
    if (!convex_order_leq(Measure(mu_), Measure(nu_), config_.tols.convex_order_tol,
                          config_.tols))
        throw AssumptionViolation("FixedPointProblem: mu must precede nu in convex order");
}

SMap FixedPointProblem::smap_for(const DiscreteMeasure& state) const {
    return SMap(state, nu_, variance_, config_.quad);
}

FixedPointProblem FixedPointProblem::rescaled_to_unit_variance() const {
    const double c = 1.0 / std::sqrt(variance_);
    return FixedPointProblem(mu_.scaled(c), scale_analytic(nu_, c), 1.0, config_);
}

// ---------------------------------------------------------------------------

DiscreteMeasure apply_G(const FixedPointProblem& p, const DiscreteMeasure& state) {
    const SMap s = p.smap_for(state);
    const std::size_t n = p.mu().size();
    std::vector<double> out(n);
    // hint with the matching state atom when shapes line up
    const bool aligned = state.size() == n;
    parallel_for(n, p.config().threads, [&](std::size_t i) {
        const double hint = aligned ? state.atoms()[i] : state.mean();
        out[i] = s.invert(p.mu().atoms()[i], hint);
    });
    return DiscreteMeasure(std::move(out), p.mu().weights());
}

QuantileGrid apply_A(const FixedPointProblem& p, const QuantileGrid& state) {
    const SMap s(state, p.nu(), p.variance(), p.config().quad);
    const int m = state.size();
    std::vector<double> out(static_cast<std::size_t>(m));
    parallel_for(static_cast<std::size_t>(m), p.config().threads, [&](std::size_t k) {
        const double u = (static_cast<double>(k) + 0.5) / m;
        out[k] = s.invert(p.mu().quantile(u), state.values()[k]);
    });
    return QuantileGrid(std::move(out), state.interp());
}

// ---------------------------------------------------------------------------

double IterationTrace::observed_rate(int window) const {
    std::vector<double> ratios;
    const int n = static_cast<int>(records_.size());
    for (int k = std::max(1, n - window); k < n; ++k) {
        if (records_[static_cast<std::size_t>(k) - 1].residual > 0.0)
            ratios.push_back(records_[static_cast<std::size_t>(k)].residual /
                             records_[static_cast<std::size_t>(k) - 1].residual);
    }
    if (ratios.empty()) return 0.0;
    std::sort(ratios.begin(), ratios.end());
    return ratios[ratios.size() / 2];
}

double IterationTrace::rate_spread(int window) const {
    const double q = observed_rate(window);
    double spread = 0.0;
    const int n = static_cast<int>(records_.size());
    for (int k = std::max(1, n - window); k < n; ++k) {
        if (records_[static_cast<std::size_t>(k) - 1].residual > 0.0)
            spread = std::max(spread,
                              std::fabs(records_[static_cast<std::size_t>(k)].residual /
                                            records_[static_cast<std::size_t>(k) - 1].residual -
                                        q));
    }
    return spread;
}

void IterationTrace::write_csv(std::ostream& out) const {
    out << "iteration,residual,rate,shift\n";
    for (const auto& r : records_)
        out << r.iteration << ',' << format_double(r.residual) << ',' << format_double(r.rate)
            << ',' << format_double(r.shift) << '\n';
}

std::string IterationTrace::to_json_string(int indent) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records_) {
        arr.push_back({{"iteration", r.iteration},
                       {"residual", r.residual},
                       {"residual_raw", r.residual_raw},
                       {"rate", r.rate},
                       {"shift", r.shift},
                       {"dist_to_final", r.dist_to_final}});
    }
    return arr.dump(indent);
}

// ---------------------------------------------------------------------------

namespace {

IterateResult iterate_unit(const FixedPointProblem& p, const DiscreteMeasure& state0) {
    using clock = std::chrono::steady_clock;
    IterateResult result;
    DiscreteMeasure state = gauge_zero_mean(state0);
    double prev_residual = -1.0;
    for (int k = 0; k < p.config().max_iters; ++k) {
        const auto t0 = clock::now();
        const DiscreteMeasure next_raw = apply_G(p, state);
        const ShiftedDistance sd =
            w_infinity_mod_shift(Measure(next_raw), Measure(state), p.config().tols);
        const double raw = w_infinity(Measure(next_raw), Measure(state), p.config().tols);
        double shift = 0.0;
        state = gauge_zero_mean(next_raw, &shift);

        IterationRecord rec;
        rec.iteration = k + 1;
        rec.residual = sd.distance;
        rec.residual_raw = raw;
        rec.rate = (prev_residual > 0.0) ? sd.distance / prev_residual : 0.0;
        rec.shift = shift;
        rec.wall_ms =
            std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        rec.state = state;
        result.trace.records().push_back(std::move(rec));
        prev_residual = sd.distance;

        if (sd.distance <= p.config().atol) {
            result.converged = true;
            break;
        }
    }
    result.iterations = static_cast<int>(result.trace.size());
    result.state = result.trace.records().empty() ? gauge_zero_mean(state0) : state;
    for (auto& r : result.trace.records())
        r.dist_to_final =
            w_infinity_mod_shift(Measure(r.state), Measure(result.state), p.config().tols)
                .distance;
    return result;
}

}  // namespace

IterateResult iterate(const FixedPointProblem& p, const DiscreteMeasure& state0) {
    if (!p.config().allow_non_irreducible &&
        !is_irreducible(Measure(p.mu()), Measure(p.nu()), p.config().tols))
        throw AssumptionViolation(
            "iterate: (mu, nu) is not irreducible; set allow_non_irreducible to proceed");
    if (p.variance() == 1.0) return iterate_unit(p, state0);
    // push to unit variance, iterate, scale the result back; the stopping
    // tolerance tightens so the back-scaled residual still meets atol
    const double c = 1.0 / std::sqrt(p.variance());
    FixedPointProblem unit = p.rescaled_to_unit_variance();
    SolverConfig cfg = unit.config();
    cfg.atol = p.config().atol * c;
    unit = FixedPointProblem(unit.mu(), unit.nu(), 1.0, cfg);
    IterateResult r = iterate_unit(unit, state0.scaled(c));
    const double back = std::sqrt(p.variance());
    r.state = r.state.scaled(back);
    for (auto& rec : r.trace.records()) {
        rec.state = rec.state.scaled(back);
        rec.residual *= back;
        rec.residual_raw *= back;
        rec.shift *= back;
        rec.dist_to_final *= back;
    }
    return r;
}

IterateResult iterate(const FixedPointProblem& p) { return iterate(p, p.mu()); }

// ---------------------------------------------------------------------------

DerivativeDensity derivative_density(const FixedPointProblem& p, const DiscreteMeasure& state) {
    const SMap s = p.smap_for(state);
    const std::size_t n = p.mu().size();
    const std::size_t m = state.size();
    DerivativeDensity d;
    d.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    d.weights.resize(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j)
        d.weights(static_cast<Eigen::Index>(j)) = state.weights()[j];

    std::vector<double> g(n);
    const bool aligned = state.size() == n;
    parallel_for(n, p.config().threads, [&](std::size_t i) {
        const double hint = aligned ? state.atoms()[i] : state.mean();
        g[i] = s.invert(p.mu().atoms()[i], hint);
    });
    parallel_for(n, p.config().threads, [&](std::size_t i) {
        const double sp = s.derivative(g[i]);
        for (std::size_t j = 0; j < m; ++j)
            d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                s.t_kernel(g[i], state.atoms()[j]) / sp;
    });
    d.eps = d.values.minCoeff();
    d.delta = d.values.maxCoeff();
    d.row_integrals = d.values * d.weights;
    return d;
}

double contraction_bound(const DerivativeDensity& d) {
    if (!(d.eps > 0.0))
        throw AssumptionViolation("contraction_bound: derivative density not bounded below");
    return (d.eps + d.delta) / (2.0 * d.eps + d.delta);
}

}  // namespace basslv
