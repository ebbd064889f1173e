#pragma once

// Gauss-Legendre rules and a small adaptive integrator built on them.

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <numbers>
#include <vector>

#include "xva/errors.hpp"

namespace xva {

struct QuadratureRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

namespace detail {

// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x)
{
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if (n == 0) return {1.0, 0.0};
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

inline QuadratureRule build_gauss_legendre(int n)
{
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace detail

// n-point Gauss-Legendre rule on [-1, 1]; rules are built once and cached.
inline const QuadratureRule& gauss_legendre(int n)
{
    if (n < 1) throw InvalidInput("Gauss-Legendre rule needs at least one node");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::build_gauss_legendre(n)).first;
    return it->second;
}

// Fixed-order rule mapped onto [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, const QuadratureRule& rule)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

// Adaptive bisection comparing 20- and 40-point rules on each panel.
// Panels are accepted once the two rules agree to `abs_tol` (scaled to the
// panel width); depth is bounded.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol, int max_depth = 30)
{
    const auto& coarse = gauss_legendre(20);
    const auto& fine = gauss_legendre(40);
    struct Panel {
        double a, b;
        int depth;
    };
    const double width = b - a;
    if (width == 0.0) return 0.0;
    std::vector<Panel> stack{{a, b, 0}};
    double total = 0.0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double i1 = integrate_gl(f, p.a, p.b, coarse);
        const double i2 = integrate_gl(f, p.a, p.b, fine);
        const double tol = abs_tol * std::abs(p.b - p.a) / std::abs(width);
        if (std::abs(i2 - i1) <= tol || p.depth >= max_depth) {
            total += i2;
        } else {
            const double m = 0.5 * (p.a + p.b);
            stack.push_back({m, p.b, p.depth + 1});
            stack.push_back({p.a, m, p.depth + 1});
        }
    }
    return total;
}

} // namespace xva
