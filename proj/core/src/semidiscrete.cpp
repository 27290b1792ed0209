#include "basslv/semidiscrete.hpp"

#include <cmath>

#include "basslv/errors.hpp"

#include <json.hpp>

namespace basslv {

namespace {

DiscreteMeasure state_from(const Eigen::VectorXd& y, const std::vector<double>& w) {
    std::vector<double> atoms(y.data(), y.data() + y.size());
    return DiscreteMeasure(std::move(atoms), w);
}

bool nondecreasing(const Eigen::VectorXd& y) {
    for (Eigen::Index i = 0; i + 1 < y.size(); ++i)
        if (y(i) > y(i + 1)) return false;
    return true;
}

}  // namespace

SemidiscreteSystem::SemidiscreteSystem(DiscreteMeasure mu, AnalyticDistribution nu,
                                       double variance, SolverConfig config)
    : mu_(std::move(mu)), nu_(std::move(nu)), variance_(variance), config_(std::move(config)) {
    // structural validation shared with the fixed-point route
    FixedPointProblem(mu_, nu_, variance_, config_);
}

SemidiscreteSystem::SemidiscreteSystem(const FixedPointProblem& p)
    : mu_(p.mu()), nu_(p.nu()), variance_(p.variance()), config_(p.config()) {}

Eigen::VectorXd SemidiscreteSystem::residual(const Eigen::VectorXd& y) const {
    if (!nondecreasing(y))
        throw std::invalid_argument("SemidiscreteSystem::residual: y must be nondecreasing");
    const SMap s(state_from(y, mu_.weights()), nu_, variance_, config_.quad);
    Eigen::VectorXd r(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        r(i) = s.eval(y(i)) - mu_.atoms()[static_cast<std::size_t>(i)];
    return r;
}

Eigen::MatrixXd SemidiscreteSystem::jacobian(const Eigen::VectorXd& y) const {
    if (!nondecreasing(y))
        throw std::invalid_argument("SemidiscreteSystem::jacobian: y must be nondecreasing");
    const SMap s(state_from(y, mu_.weights()), nu_, variance_, config_.quad);
    const Eigen::Index n = y.size();
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            J(i, j) = -mu_.weights()[static_cast<std::size_t>(j)] * s.t_kernel(y(i), y(j));
        J(i, i) += s.derivative(y(i));
    }
    return J;
}

// ---------------------------------------------------------------------------

std::string NewtonResult::to_json_string(int indent) const {
    nlohmann::json j{{"iterations", iterations},
                     {"residual_norm", residual_norm},
                     {"converged", converged},
                     {"singular_values", singular_values},
                     {"y", y}};
    return j.dump(indent);
}

namespace {

// Newton step on the generic system with a backtracking line search;
// `solve_step` produces the search direction from (y, R).
template <typename ResidualFn, typename StepFn>
NewtonResult newton_loop(Eigen::VectorXd y, const ResidualFn& resid, const StepFn& solve_step,
                         const NewtonOptions& opts) {
    NewtonResult out;
    Eigen::VectorXd r = resid(y);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < opts.max_iters; ++it) {
        if (rnorm <= opts.atol) break;
        out.iterations = it + 1;
        const Eigen::VectorXd step = solve_step(y, r);
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h, alpha *= 0.5) {
            Eigen::VectorXd cand = y + alpha * step;
            if (!nondecreasing(cand)) continue;  // reject, halve
            const Eigen::VectorXd rc = resid(cand);
            const double cnorm = rc.lpNorm<Eigen::Infinity>();
            if (cnorm < rnorm || cnorm <= opts.atol) {
                y = std::move(cand);
                r = rc;
                rnorm = cnorm;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // stalled: report best point found
    }
    out.converged = rnorm <= opts.atol;
    out.residual_norm = rnorm;
    out.y.assign(y.data(), y.data() + y.size());
    return out;
}

}  // namespace

NewtonResult solve_newton(const SemidiscreteSystem& sys, const Eigen::VectorXd& y0,
                          const NewtonOptions& opts) {
    const Eigen::Index n = y0.size();
    if (n != static_cast<Eigen::Index>(sys.size()))
        throw std::invalid_argument("solve_newton: y0 size mismatch");
    if (!nondecreasing(y0))
        throw std::invalid_argument("solve_newton: y0 must be nondecreasing");
    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = sys.mu().weights()[static_cast<std::size_t>(j)];

    auto resid = [&](const Eigen::VectorXd& y) { return sys.residual(y); };
    // bordered system removes the J*1 = 0 null direction and enforces the
    // zero weighted-mean gauge
    auto step = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& r) {
        const Eigen::MatrixXd J = sys.jacobian(y);
        Eigen::MatrixXd A(n + 1, n + 1);
        A.setZero();
        A.topLeftCorner(n, n) = J;
        A.topRightCorner(n, 1) = w;
        A.bottomLeftCorner(1, n) = w.transpose();
        Eigen::VectorXd rhs(n + 1);
        rhs.head(n) = -r;
        rhs(n) = -w.dot(y);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible())
            throw std::runtime_error("solve_newton: singular augmented Jacobian");
        const Eigen::VectorXd sol = lu.solve(rhs);
        return Eigen::VectorXd(sol.head(n));
    };

    // start on the gauge
    Eigen::VectorXd y = y0;
    y.array() -= w.dot(y0);
    NewtonResult out = newton_loop(y, resid, step, opts);

    Eigen::Map<Eigen::VectorXd> yv(out.y.data(), static_cast<Eigen::Index>(out.y.size()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.jacobian(yv));
    out.singular_values.assign(svd.singularValues().data(),
                               svd.singularValues().data() + svd.singularValues().size());
    return out;
}

NewtonResult solve_newton(const SemidiscreteSystem& sys, const NewtonOptions& opts) {
    const FixedPointProblem p(sys.mu(), sys.nu(), sys.variance(), sys.config());
    const DiscreteMeasure sweep = apply_G(p, p.mu());
    if (sweep.size() != sys.size())
        throw std::runtime_error("solve_newton: degenerate initial sweep (atoms merged)");
    Eigen::VectorXd y0(static_cast<Eigen::Index>(sweep.size()));
    for (std::size_t j = 0; j < sweep.size(); ++j)
        y0(static_cast<Eigen::Index>(j)) = sweep.atoms()[j];
    return solve_newton(sys, y0, opts);
}

// ---------------------------------------------------------------------------

ReducedSystem::ReducedSystem(const SemidiscreteSystem& full)
    : full_(full), half_(full.size() / 2), odd_(full.size() % 2 == 1), center_(0.0) {}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& y_half) const {
    const std::size_t n = full_.size();
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < half_; ++j) {
        y(static_cast<Eigen::Index>(j)) = y_half(static_cast<Eigen::Index>(j));
        y(static_cast<Eigen::Index>(n - 1 - j)) = 2.0 * center_ - y_half(static_cast<Eigen::Index>(j));
    }
    if (odd_) y(static_cast<Eigen::Index>(half_)) = center_;
    return y;
}

Eigen::VectorXd ReducedSystem::residual(const Eigen::VectorXd& y_half) const {
    return full_.residual(expand(y_half)).head(static_cast<Eigen::Index>(half_));
}

Eigen::MatrixXd ReducedSystem::jacobian(const Eigen::VectorXd& y_half) const {
    const Eigen::MatrixXd J = full_.jacobian(expand(y_half));
    const Eigen::Index h = static_cast<Eigen::Index>(half_);
    const Eigen::Index n = J.rows();
    Eigen::MatrixXd Jr(h, h);
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < h; ++j) Jr(i, j) = J(i, j) - J(i, n - 1 - j);
    return Jr;
}

NewtonResult ReducedSystem::solve(const NewtonOptions& opts) const {
    const FixedPointProblem p(full_.mu(), full_.nu(), full_.variance(), full_.config());
    const DiscreteMeasure sweep = apply_G(p, p.mu());
    Eigen::VectorXd y0(static_cast<Eigen::Index>(half_));
    const double c = sweep.mean();
    for (std::size_t j = 0; j < half_; ++j)
        y0(static_cast<Eigen::Index>(j)) = sweep.atoms()[j] - c;

    auto resid = [&](const Eigen::VectorXd& yh) { return residual(yh); };
    auto step = [&](const Eigen::VectorXd& yh, const Eigen::VectorXd& r) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian(yh));
        if (!lu.isInvertible())
            throw std::runtime_error("ReducedSystem::solve: singular Jacobian");
        return Eigen::VectorXd(lu.solve(-r));
    };
    // monotonicity of the expanded vector is what matters
    NewtonResult out;
    {
        Eigen::VectorXd y = y0;
        Eigen::VectorXd r = resid(y);
        double rnorm = r.lpNorm<Eigen::Infinity>();
        for (int it = 0; it < opts.max_iters; ++it) {
            if (rnorm <= opts.atol) break;
            out.iterations = it + 1;
            const Eigen::VectorXd dir = step(y, r);
            double alpha = 1.0;
            bool accepted = false;
            for (int h = 0; h <= opts.max_halvings; ++h, alpha *= 0.5) {
                Eigen::VectorXd cand = y + alpha * dir;
                if (!nondecreasing(expand(cand))) continue;
                const Eigen::VectorXd rc = resid(cand);
                const double cnorm = rc.lpNorm<Eigen::Infinity>();
                if (cnorm < rnorm || cnorm <= opts.atol) {
                    y = std::move(cand);
                    r = rc;
                    rnorm = cnorm;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
        out.converged = rnorm <= opts.atol;
        out.residual_norm = rnorm;
        const Eigen::VectorXd yf = expand(y);
        out.y.assign(yf.data(), yf.data() + yf.size());
    }
    return out;
}

ReducedSystem symmetry_reduce(const SemidiscreteSystem& sys, double tol) {
    const DiscreteMeasure& mu = sys.mu();
    const std::size_t n = mu.size();
    const double c = mu.mean();
    const double scale = std::max(1.0, std::fabs(mu.atoms().front()) + std::fabs(mu.atoms().back()));
    for (std::size_t j = 0; j < n; ++j) {
        if (std::fabs(mu.atoms()[j] + mu.atoms()[n - 1 - j] - 2.0 * c) > tol * scale ||
            std::fabs(mu.weights()[j] - mu.weights()[n - 1 - j]) > tol)
            throw AssumptionViolation("symmetry_reduce: mu is not symmetric");
    }
    const AnalyticDistribution& nu = sys.nu();
    const double cn = nu.mean();
    for (int k = 1; k < 64; ++k) {
        const double u = static_cast<double>(k) / 64.0 * 0.5;
        if (std::fabs(nu.quantile(0.5 + u) + nu.quantile(0.5 - u) - 2.0 * cn) >
            tol * std::max(1.0, std::fabs(cn) + nu.support().length()))
            throw AssumptionViolation("symmetry_reduce: nu is not symmetric");
    }
    return ReducedSystem(sys);
}

}  // namespace basslv
