#pragma once

#include <cstddef>
#include <vector>

namespace tatrec {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule of order n (nodes ascending), computed by Newton
/// iteration on the Legendre recurrence; cached per order.
const GaussRule& gauss_legendre(std::size_t n);

/// Integrates fn over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double gauss_integrate(F&& fn, double a, double b, std::size_t n) {
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * fn(mid + half * rule.nodes[i]);
    return acc * half;
}

}  // namespace tatrec
