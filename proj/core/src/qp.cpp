#include "basslv/numeric/qp.hpp"

#include <stdexcept>
#include <vector>

namespace basslv {

namespace {

// Equality-constrained step: min 1/2 p'Hp + grad'p  s.t. A p = 0, via the
// KKT system. A collects equality rows plus the active inequality rows.
Eigen::VectorXd kkt_step(const Eigen::MatrixXd& H, const Eigen::VectorXd& grad,
                         const Eigen::MatrixXd& A, Eigen::VectorXd* multipliers) {
    const int n = static_cast<int>(H.rows());
    const int m = static_cast<int>(A.rows());
    Eigen::MatrixXd K(n + m, n + m);
    K.setZero();
    K.topLeftCorner(n, n) = H;
    if (m > 0) {
        K.topRightCorner(n, m) = A.transpose();
        K.bottomLeftCorner(m, n) = A;
    }
    Eigen::VectorXd rhs(n + m);
    rhs.head(n) = -grad;
    rhs.tail(m).setZero();
    Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    if (multipliers) *multipliers = sol.tail(m);
    return sol.head(n);
}

}  // namespace

QpResult solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                  const Eigen::MatrixXd& Ae, const Eigen::VectorXd& be,
                  const Eigen::MatrixXd& Ai, const Eigen::VectorXd& bi,
                  const Eigen::VectorXd& x0, double tol, int max_iter) {
    const int n = static_cast<int>(H.rows());
    const int me = static_cast<int>(Ae.rows());
    const int mi = static_cast<int>(Ai.rows());
    if (max_iter <= 0) max_iter = 50 * (n + mi + me) + 200;

    Eigen::VectorXd x = x0;

    // Restore equality feasibility and clip inequality violations of the
    // start point by a least-squares correction when needed.
    if (me > 0 && (Ae * x - be).cwiseAbs().maxCoeff() > tol) {
        Eigen::VectorXd corr = Ae.fullPivLu().solve(be - Ae * x);
        if ((Ae * (x + corr) - be).cwiseAbs().maxCoeff() >
            (Ae * x - be).cwiseAbs().maxCoeff())
            throw std::runtime_error("solve_qp: cannot restore equality feasibility");
        x += corr;
    }

    std::vector<char> active(mi, 0);
    // Start with constraints active where the start point sits on them.
    for (int i = 0; i < mi; ++i)
        if (Ai.row(i) * x - bi(i) < tol) active[i] = 1;

    QpResult out;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        std::vector<int> act;
        for (int i = 0; i < mi; ++i)
            if (active[i]) act.push_back(i);
        Eigen::MatrixXd A(me + static_cast<int>(act.size()), n);
        for (int r = 0; r < me; ++r) A.row(r) = Ae.row(r);
        for (std::size_t k = 0; k < act.size(); ++k) A.row(me + static_cast<int>(k)) = Ai.row(act[k]);

        Eigen::VectorXd grad = H * x + g;
        Eigen::VectorXd lambda;
        Eigen::VectorXd p = kkt_step(H, grad, A, &lambda);

        if (p.norm() <= tol * (1.0 + x.norm())) {
            // At a stationary point of the working set: check multipliers.
            int worst = -1;
            double worst_val = -tol;
            for (std::size_t k = 0; k < act.size(); ++k) {
                const double lam = lambda(me + static_cast<int>(k));
                if (lam < worst_val) {
                    worst_val = lam;
                    worst = act[k];
                }
            }
            if (worst < 0) {
                out.x = x;
                out.converged = true;
                return out;
            }
            active[worst] = 0;
            continue;
        }

        // Longest step along p not leaving the feasible region.
        double alpha = 1.0;
        int blocking = -1;
        for (int i = 0; i < mi; ++i) {
            if (active[i]) continue;
            const double dir = Ai.row(i) * p;
            if (dir < -1e-14) {
                const double gap = Ai.row(i) * x - bi(i);
                const double a = gap / (-dir);
                if (a < alpha) {
                    alpha = a;
                    blocking = i;
                }
            }
        }
        x += alpha * p;
        if (blocking >= 0) active[blocking] = 1;
    }
    out.x = x;
    out.converged = false;
    return out;
}

}  // namespace basslv
