#pragma once

// Independent reference computations and shared parameter sets for the test
// suites. Nothing here calls the library's pricing code.

#include <cmath>
#include <functional>
#include <random>

#include "xva/market_model.hpp"
#include "xva/quadrature.hpp"

namespace xva::test {

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Composite Gauss–Legendre with `panels` equal panels of 20 nodes.
inline double composite_gl(const std::function<double(double)>& f, double a, double b, int panels)
{
    const auto& rule = gauss_legendre(20);
    const double w = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += 0.5 * w * rule.weights[k] * f(lo + 0.5 * w * (rule.nodes[k] + 1.0));
    }
    return s;
}

// e^{−r τ} E[Φ(S_T)] under log-normal dynamics, by Simpson in the Gaussian
// variable. Accurate to about 1e-7 relative for piecewise-linear Φ.
inline double lognormal_expectation(const std::function<double(double)>& payoff, double r, double sigma, double tau,
                                    double S)
{
    if (tau <= 0.0) return payoff(S);
    const double m = std::log(S) + (r - 0.5 * sigma * sigma) * tau;
    const double sd = sigma * std::sqrt(tau);
    const double pdf_c = 1.0 / std::sqrt(2.0 * M_PI);
    auto f = [&](double z) { return payoff(std::exp(m + sd * z)) * pdf_c * std::exp(-0.5 * z * z); };
    return std::exp(-r * tau) * simpson(f, -12.0, 12.0, 48000);
}

// E[e^{λτ_1} 1{τ_1 < τ_2 ∧ Δ}] as a double integral over the joint density
// h_1 h_2 e^{−h_1 u − h_2 w} of two independent exponential times.
inline double first_default_double_integral(double lambda, double h1, double h2, double horizon)
{
    auto outer = [&](double u) {
        const double tail = 60.0 / h2;
        const double inner = composite_gl([&](double w) { return h2 * std::exp(-h2 * w); }, u, u + tail, 60);
        return h1 * std::exp(-h1 * u) * std::exp(lambda * u) * inner;
    };
    return composite_gl(outer, 0.0, horizon, 40);
}

// Figure parameter set with bilateral defaults: r_D = r_r = 0.05, r_f = 0.08,
// r_c = 0.01, valuation intensities h_I, h_C, L_I = L_C = 0.5.
inline MarketParams defaults_case(double alpha, double h_I = 0.15, double h_C = 0.2, double r_f = 0.08)
{
    MarketParams m;
    m.rates = RateSet::flat(0.05);
    m.rates.r_f_plus = m.rates.r_f_minus = r_f;
    m.rates.r_c_plus = m.rates.r_c_minus = 0.01;
    m.credit.h_I_Q = h_I;
    m.credit.h_C_Q = h_C;
    m.credit.L_I = m.credit.L_C = 0.5;
    resolve_intensity_overrides(m, false, false);
    m.alpha = alpha;
    return m;
}

// Default-free funding case with r_D = r_r = 0.05 and r_c = 0.01.
inline MarketParams funding_case(double alpha, double r_f)
{
    MarketParams m;
    m.rates = RateSet::flat(0.05);
    m.rates.r_f_plus = m.rates.r_f_minus = r_f;
    m.rates.r_c_plus = m.rates.r_c_minus = 0.01;
    m.credit.defaults_enabled = false;
    m.alpha = alpha;
    return m;
}

// A rate set that satisfies every no-arbitrage inequality, with genuinely
// asymmetric borrowing and lending.
inline MarketParams admissible_asymmetric(double alpha = 0.3)
{
    MarketParams m;
    m.rates.r_D = 0.03;
    m.rates.r_r_plus = 0.03;
    m.rates.r_f_plus = 0.035;
    m.rates.r_r_minus = 0.04;
    m.rates.r_f_minus = 0.05;
    m.rates.r_c_plus = 0.02;
    m.rates.r_c_minus = 0.025;
    m.credit.h_I_P = 0.02;
    m.credit.h_C_P = 0.03;
    m.credit.r_I = 0.11;
    m.credit.r_C = 0.12;
    m.credit.L_I = 0.4;
    m.credit.L_C = 0.6;
    m.alpha = alpha;
    return m;
}

} // namespace xva::test
