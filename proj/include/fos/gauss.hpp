#pragma once

#include <vector>

namespace fos {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached per n; thread-safe).
const GaussRule& gauss_legendre(int n);

/// int_a^b f with a single n-point Gauss-Legendre panel.
template <class F>
double gauss_panel(F&& f, double a, double b, int n = 10) {
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * sum;
}

}  // namespace fos
