#pragma once

#include <vector>

namespace ismp {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] (Golub-Welsch on the Jacobi matrix).
QuadratureRule gauss_legendre(int n);

// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

// Gauss-Hermite rule for weight exp(-v^2) on the real line.
QuadratureRule gauss_hermite(int n);

// Gauss-Laguerre rule for weight exp(-w) on [0, inf).
QuadratureRule gauss_laguerre(int n);

// Expectation E[h(U)] for U ~ N(0,1) via a Gauss-Hermite rule.
template <class F>
double gauss_normal_expectation(const QuadratureRule& gh, F&& h) {
    constexpr double inv_sqrt_pi = 0.5641895835477562869;
    const double sqrt2 = 1.4142135623730951;
    double s = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        s += gh.weights[i] * h(sqrt2 * gh.nodes[i]);
    return inv_sqrt_pi * s;
}

// Composite 1D Simpson rule with an odd number of points (>= 3) on [a, b].
QuadratureRule simpson(int npoints, double a, double b);

} // namespace ismp
