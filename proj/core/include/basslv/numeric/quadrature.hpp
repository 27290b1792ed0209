#pragma once

#include <vector>

namespace basslv {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

/// Gauss-Hermite rule in probabilists' normalization: for smooth g,
///   integral g(z) phi(z) dz  ~=  sum_i weights[i] * g(nodes[i]),
/// with phi the standard normal density. Weights sum to 1.
const QuadratureRule& gauss_hermite_prob(int n);

/// integral_{a}^{b} g(x) dx by an n-point Gauss-Legendre rule.
template <typename F>
double integrate_gl(F&& g, double a, double b, int n = 16) {
    const QuadratureRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * g(mid + half * r.nodes[i]);
    return acc * half;
}

}  // namespace basslv
