#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace thetalab {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss–Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n)
{
    detail::require(n >= 1 && n <= 512, "gauss_legendre: n must be in [1, 512]");
    GaussRule r{std::vector<double>(n), std::vector<double>(n)};
    // P_n(x) and P_n'(x) by the three-term recurrence
    auto legendre = [n](double x, double& dp) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        return p1;
    };
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double dx = legendre(x, dp) / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre(x, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

/// Composite Gauss–Legendre integral of fn over [a, b] with `panels` equal
/// panels of `order` nodes each.
template <class Fn>
auto composite_gauss(Fn&& fn, double a, double b, int panels = 16, int order = 16)
{
    const GaussRule g = gauss_legendre(order);
    const double w = (b - a) / panels;
    decltype(fn(a)) acc{};
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        for (int i = 0; i < order; ++i) acc += (0.5 * w * g.weights[i]) * fn(lo + 0.5 * w * (g.nodes[i] + 1.0));
    }
    return acc;
}

} // namespace thetalab
