#pragma once

#include <utility>
#include <vector>

namespace qgraph {

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Integrate f over [a, b] with an n-node Gauss-Legendre rule.
template <typename F>
double integrate_gl(F&& f, double a, double b, int n = 64) {
    auto [x, w] = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += w[i] * f(mid + half * x[i]);
    }
    return half * sum;
}

}  // namespace qgraph
