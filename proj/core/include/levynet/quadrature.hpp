// Gauss-Legendre nodes/weights and panel integration helpers.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace levynet {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;

    // Newton iteration on the Legendre polynomial roots.
    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        const double pi = 3.14159265358979323846;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

inline const GaussLegendre& gl_rule(int n) {
    static const GaussLegendre g16(16), g32(32), g64(64), g128(128);
    if (n <= 16) return g16;
    if (n <= 32) return g32;
    if (n <= 64) return g64;
    return g128;
}

template <typename F>
auto integrate_gl(const F& f, double a, double b, int order)
    -> decltype(f(0.0)) {
    const auto& rule = gl_rule(order);
    decltype(f(0.0)) acc{};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

// Splits [a, b] at the supplied breakpoints and integrates each panel with a
// fixed-order rule, subdividing panels further to `panelsPerSegment`.
template <typename F>
auto integrate_panels(const F& f, double a, double b,
                      const std::vector<double>& breaks, int panelsPerSegment,
                      int order) -> decltype(f(0.0)) {
    std::vector<double> edges{a};
    for (double c : breaks)
        if (c > a && c < b) edges.push_back(c);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    decltype(f(0.0)) acc{};
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double lo = edges[s], hi = edges[s + 1];
        const double h = (hi - lo) / panelsPerSegment;
        for (int p = 0; p < panelsPerSegment; ++p)
            acc += integrate_gl(f, lo + p * h, lo + (p + 1) * h, order);
    }
    return acc;
}

}  // namespace levynet
