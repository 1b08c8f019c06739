#pragma once
// Gauss-Legendre quadrature with panel subdivision and geometric grading.
//
// Nodes and weights on [-1,1] are computed once per order by Newton
// iteration on P_n (initial guesses from the Chebyshev asymptotic), which is
// accurate to machine precision for the moderate orders used here.  Panels
// allow composite integration; geometric grading concentrates panels toward
// an endpoint hosting an integrable singularity (|x-a|^{-α}, α < 1), which
// plain uniform panels resolve poorly.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "summation.hpp"

namespace speclab {

struct gauss_rule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;  // positive, sum to 2
};

inline gauss_rule gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    gauss_rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based initial guess for the i-th root (descending).
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n(x) and P_{n-1}(x) by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 -
                                   (static_cast<double>(k) - 1.0) * p0) /
                                  static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;  // ascending order: most negative first
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

// Integrate f over [a, b] with a single Gauss panel of the given order.
inline double integrate_panel(const std::function<double(double)>& f, double a,
                              double b, const gauss_rule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        terms[i] = rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * pairwise_sum(terms);
}

// Composite integration over [a, b] with n_panels uniform panels.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        std::size_t order = 16, std::size_t n_panels = 8) {
    if (!(b > a)) throw std::invalid_argument("integrate: require b > a");
    if (n_panels == 0) throw std::invalid_argument("integrate: need >= 1 panel");
    const gauss_rule rule = gauss_legendre(order);
    std::vector<double> parts(n_panels);
    const double h = (b - a) / static_cast<double>(n_panels);
    for (std::size_t i = 0; i < n_panels; ++i)
        parts[i] = integrate_panel(f, a + h * static_cast<double>(i),
                                   a + h * static_cast<double>(i + 1), rule);
    return pairwise_sum(parts);
}

// Composite integration over [a, b] with panels geometrically refined toward
// x = a (ratio < 1 shrinks panels approaching the singular endpoint).  For an
// integrable endpoint singularity pass the singular point as `a`; to grade
// toward the right endpoint, integrate x -> f(a+b-x) instead.
inline double integrate_graded_left(const std::function<double(double)>& f, double a,
                                    double b, std::size_t order = 16,
                                    std::size_t n_panels = 24, double ratio = 0.5) {
    if (!(b > a)) throw std::invalid_argument("integrate_graded_left: require b > a");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("integrate_graded_left: ratio must be in (0,1)");
    const gauss_rule rule = gauss_legendre(order);
    // Breakpoints a + (b-a)·ratio^m, m = n_panels..0; the innermost panel
    // touches `a` so the singular weight is integrated, not sampled, at a.
    std::vector<double> parts;
    parts.reserve(n_panels + 1);
    double right = b;
    for (std::size_t m = 1; m <= n_panels; ++m) {
        const double left = a + (b - a) * std::pow(ratio, static_cast<double>(m));
        parts.push_back(integrate_panel(f, left, right, rule));
        right = left;
    }
    parts.push_back(integrate_panel(f, a, right, rule));
    return pairwise_sum(parts);
}

}  // namespace speclab
