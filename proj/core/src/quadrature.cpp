#include "basslv/numeric/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace basslv {

namespace {

// Newton iteration on the Legendre recurrence, nodes symmetric about 0.
QuadratureRule make_legendre(int n) {
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

// Physicists' Gauss-Hermite (weight exp(-t^2)), then rescaled to the
// probabilists' normalization z = sqrt(2) t, weights / sqrt(pi).
QuadratureRule make_hermite(int n) {
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    double x = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            x -= 1.14 * std::pow(static_cast<double>(n), 0.426) / x;
        } else if (i == 2) {
            x = 1.86 * x - 0.86 * r.nodes[0];
        } else if (i == 3) {
            x = 1.91 * x - 0.91 * r.nodes[1];
        } else {
            x = 2.0 * x - r.nodes[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = x * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = x;  // store descending in first half, mirror below
        r.weights[i] = 2.0 / (pp * pp);
    }
    // mirror and sort ascending; convert to probabilists' form
    QuadratureRule out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double sqrt2 = std::sqrt(2.0);
    const double invsqrtpi = 1.0 / std::sqrt(M_PI);
    for (int i = 0; i < m; ++i) {
        out.nodes[i] = -r.nodes[i] * sqrt2;
        out.weights[i] = r.weights[i] * invsqrtpi;
        out.nodes[n - 1 - i] = r.nodes[i] * sqrt2;
        out.weights[n - 1 - i] = r.weights[i] * invsqrtpi;
    }
    return out;
}

std::mutex g_mutex;
std::map<int, QuadratureRule> g_legendre, g_hermite;

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    std::lock_guard<std::mutex> lock(g_mutex);
    auto it = g_legendre.find(n);
    if (it == g_legendre.end()) it = g_legendre.emplace(n, make_legendre(n)).first;
    return it->second;
}

const QuadratureRule& gauss_hermite_prob(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite_prob: order must be >= 1");
    std::lock_guard<std::mutex> lock(g_mutex);
    auto it = g_hermite.find(n);
    if (it == g_hermite.end()) it = g_hermite.emplace(n, make_hermite(n)).first;
    return it->second;
}

}  // namespace basslv
