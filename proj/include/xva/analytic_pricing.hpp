#pragma once

// Public (third-party) valuation V̂ of European claims, its delta, and the
// strike-zero compound values Θ̂^{s,±}.
//
// Every supported payoff is piecewise linear in S_T, so it is stored in the
// canonical form  a + b·S + Σ c_k (S − K_k)^+  and valued exactly with
// Black–Scholes calls. No quadrature is needed for V̂ or its delta.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "xva/errors.hpp"
#include "xva/quadrature.hpp"

namespace xva {

enum class ClaimKind { call, put, custom };
enum class Side { long_, short_ };

struct Knot {
    double x = 0.0; // terminal stock price
    double y = 0.0; // payoff value
};

struct ClaimSpec {
    ClaimKind kind = ClaimKind::call;
    double strike = 100.0;
    double maturity = 1.0;
    Side side = Side::long_;
    double notional = 1.0;
    // Custom payoffs: at least two knots with strictly increasing x >= 0. The
    // first and last segments are extended linearly.
    std::vector<Knot> knots;

    static ClaimSpec call(double K, double T) { return {ClaimKind::call, K, T, Side::long_, 1.0, {}}; }
    static ClaimSpec put(double K, double T) { return {ClaimKind::put, K, T, Side::long_, 1.0, {}}; }
    static ClaimSpec custom(std::vector<Knot> knots, double T)
    {
        return {ClaimKind::custom, 0.0, T, Side::long_, 1.0, std::move(knots)};
    }
    // The claim with payoff γ·Φ.
    ClaimSpec scaled(double gamma) const
    {
        ClaimSpec c = *this;
        c.notional *= gamma;
        return c;
    }
    ClaimSpec negated() const
    {
        ClaimSpec c = *this;
        c.side = side == Side::long_ ? Side::short_ : Side::long_;
        return c;
    }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// a + b·S + Σ c_k (S − K_k)^+ with K_k > 0 strictly increasing.
struct LinearPayoff {
    double a = 0.0;
    double b = 0.0;
    std::vector<std::pair<double, double>> kinks; // (K_k, c_k)

    double operator()(double S) const
    {
        double v = a + b * S;
        for (const auto& [K, c] : kinks) v += c * std::max(S - K, 0.0);
        return v;
    }
    double slope_left(double S) const
    {
        double d = b;
        for (const auto& [K, c] : kinks)
            if (S > K) d += c;
        return d;
    }
    double slope_right(double S) const
    {
        double d = b;
        for (const auto& [K, c] : kinks)
            if (S >= K) d += c;
        return d;
    }
    double final_slope() const
    {
        double d = b;
        for (const auto& kc : kinks) d += kc.second;
        return d;
    }
    bool is_zero() const
    {
        return a == 0.0 && b == 0.0 && std::all_of(kinks.begin(), kinks.end(), [](auto& k) { return k.second == 0.0; });
    }
    // Φ >= 0 on [0, ∞): checked at 0, every kink and the final slope.
    bool nonnegative() const
    {
        if (a < 0.0) return false;
        for (const auto& kc : kinks)
            if ((*this)(kc.first) < 0.0) return false;
        return final_slope() >= 0.0;
    }
    bool nonpositive() const
    {
        if (a > 0.0) return false;
        for (const auto& kc : kinks)
            if ((*this)(kc.first) > 0.0) return false;
        return final_slope() <= 0.0;
    }
};

namespace detail {

inline void require_finite_claim(double x, const char* what)
{
    if (!std::isfinite(x)) throw InvalidInput(std::string("non-finite claim field: ") + what);
}

} // namespace detail

// Checks the claim and returns its canonical linear form.
inline LinearPayoff canonical_payoff(const ClaimSpec& claim)
{
    detail::require_finite_claim(claim.maturity, "maturity");
    detail::require_finite_claim(claim.strike, "strike");
    detail::require_finite_claim(claim.notional, "notional");
    if (!(claim.maturity > 0.0)) throw InvalidInput("maturity must be positive");

    LinearPayoff p;
    switch (claim.kind) {
    case ClaimKind::call:
        if (claim.strike < 0.0) throw InvalidInput("strike must be non-negative");
        if (claim.strike == 0.0) p.b = 1.0;
        else p.kinks.emplace_back(claim.strike, 1.0);
        break;
    case ClaimKind::put:
        if (claim.strike < 0.0) throw InvalidInput("strike must be non-negative");
        if (claim.strike > 0.0) {
            p.a = claim.strike;
            p.b = -1.0;
            p.kinks.emplace_back(claim.strike, 1.0);
        }
        break;
    case ClaimKind::custom: {
        const auto& k = claim.knots;
        if (k.size() < 2) throw InvalidInput("custom payoff needs at least two knots");
        for (std::size_t i = 0; i < k.size(); ++i) {
            detail::require_finite_claim(k[i].x, "knot x");
            detail::require_finite_claim(k[i].y, "knot y");
            if (k[i].x < 0.0) throw InvalidInput("knot x must be non-negative");
            if (i > 0 && !(k[i].x > k[i - 1].x)) throw InvalidInput("knot x must be strictly increasing");
        }
        auto slope = [&](std::size_t i) { return (k[i + 1].y - k[i].y) / (k[i + 1].x - k[i].x); };
        p.b = slope(0);
        p.a = k[0].y - p.b * k[0].x;
        for (std::size_t i = 1; i + 1 < k.size(); ++i) {
            const double c = slope(i) - slope(i - 1);
            if (c == 0.0) continue;
            if (k[i].x == 0.0) { // kink at the origin is just a change of slope on (0, ∞)
                p.b += c;
            } else {
                p.kinks.emplace_back(k[i].x, c);
            }
        }
        break;
    }
    }
    const double m = claim.notional * (claim.side == Side::long_ ? 1.0 : -1.0);
    p.a *= m;
    p.b *= m;
    for (auto& kc : p.kinks) kc.second *= m;
    return p;
}

inline double payoff_value(const ClaimSpec& claim, double S) { return canonical_payoff(claim)(S); }

// Exact Black–Scholes evaluation of a canonical payoff under the valuation
// measure (drift r_D, volatility σ). Cheap to copy; build once per claim.
class PublicPricer {
public:
    PublicPricer(const ClaimSpec& claim, double r_D, double sigma)
        : payoff_(canonical_payoff(claim)), T_(claim.maturity), r_D_(r_D), sigma_(sigma)
    {
        if (!std::isfinite(r_D) || !std::isfinite(sigma)) throw InvalidInput("non-finite rate or volatility");
        if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
    }

    const LinearPayoff& payoff() const { return payoff_; }
    double maturity() const { return T_; }
    double r_D() const { return r_D_; }
    double sigma() const { return sigma_; }

    double value(double t, double S) const
    {
        check(t, S);
        const double tau = T_ - t;
        if (tau <= 0.0) return payoff_(S);
        const double df = std::exp(-r_D_ * tau);
        const double sd = sigma_ * std::sqrt(tau);
        double v = payoff_.a * df + payoff_.b * S;
        for (const auto& [K, c] : payoff_.kinks) {
            const double d1 = (std::log(S / K) + (r_D_ + 0.5 * sigma_ * sigma_) * tau) / sd;
            v += c * (S * normal_cdf(d1) - K * df * normal_cdf(d1 - sd));
        }
        return v;
    }

    // ∂V̂/∂S; at maturity on a kink, the mean of the one-sided slopes.
    double delta(double t, double S) const
    {
        check(t, S);
        const double tau = T_ - t;
        if (tau <= 0.0) return 0.5 * (payoff_.slope_left(S) + payoff_.slope_right(S));
        const double sd = sigma_ * std::sqrt(tau);
        double d = payoff_.b;
        for (const auto& [K, c] : payoff_.kinks) {
            const double d1 = (std::log(S / K) + (r_D_ + 0.5 * sigma_ * sigma_) * tau) / sd;
            d += c * normal_cdf(d1);
        }
        return d;
    }

    double gamma(double t, double S) const
    {
        check(t, S);
        const double tau = T_ - t;
        if (tau <= 0.0) return 0.0;
        const double sd = sigma_ * std::sqrt(tau);
        double g = 0.0;
        for (const auto& [K, c] : payoff_.kinks) {
            const double d1 = (std::log(S / K) + (r_D_ + 0.5 * sigma_ * sigma_) * tau) / sd;
            g += c * normal_pdf(d1) / (S * sd);
        }
        return g;
    }

private:
    void check(double t, double S) const
    {
        if (!std::isfinite(t) || !std::isfinite(S)) throw InvalidInput("non-finite evaluation point");
        if (t < 0.0 || t > T_) throw DomainError("evaluation time outside [0, T]");
        if (!(S > 0.0)) throw DomainError("stock price must be positive");
    }

    LinearPayoff payoff_;
    double T_;
    double r_D_;
    double sigma_;
};

inline double public_value(const ClaimSpec& claim, double r_D, double sigma, double t, double S)
{
    return PublicPricer(claim, r_D, sigma).value(t, S);
}

inline double public_delta(const ClaimSpec& claim, double r_D, double sigma, double t, double S)
{
    return PublicPricer(claim, r_D, sigma).delta(t, S);
}

struct ThetaPair {
    double plus = 0.0;  // Θ̂^{s,+}: value of the compound paying V̂(s)^+
    double minus = 0.0; // Θ̂^{s,−}: value of the compound paying −V̂(s)^− (≤ 0)
};

struct PublicQuote {
    double value = 0.0;
    double delta = 0.0;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
};

// Both strike-zero compound values at horizon s ∈ [t, T]:
// Θ̂^{s,±} = e^{−r_D(s−t)} E[V̂(s,S_s) 1{±V̂(s,S_s) ≥/< 0} | S_t = S].
//
// Sign-definite payoffs short-circuit. Otherwise the Gaussian expectation is
// split at the sign changes of V̂(s,·) (and at the payoff knots when s = T)
// and integrated panel-wise to an absolute tolerance of 1e-8·(1 + |V̂|).
inline ThetaPair compound_theta(const PublicPricer& pricer, double t, double S, double s)
{
    if (!std::isfinite(s) || !std::isfinite(t)) throw InvalidInput("non-finite compound horizon");
    if (s < t || s > pricer.maturity()) throw DomainError("compound horizon s must lie in [t, T]");
    const double v = pricer.value(t, S);
    const auto& payoff = pricer.payoff();
    if (payoff.nonnegative()) return {v, 0.0};
    if (payoff.nonpositive()) return {0.0, v};
    if (s == t) return v >= 0.0 ? ThetaPair{v, 0.0} : ThetaPair{0.0, v};

    const double tau = s - t;
    const double sigma = pricer.sigma();
    const double sd = sigma * std::sqrt(tau);
    const double drift = std::log(S) + (pricer.r_D() - 0.5 * sigma * sigma) * tau;
    auto stock = [&](double z) { return std::exp(drift + sd * z); };
    auto inner = [&](double z) { return pricer.value(s, stock(z)); };

    constexpr double z_max = 9.0;
    std::vector<double> cuts{-z_max, z_max};
    if (s >= pricer.maturity()) {
        for (const auto& kc : payoff.kinks) {
            const double z = (std::log(kc.first) - drift) / sd;
            if (z > -z_max && z < z_max) cuts.push_back(z);
        }
    }
    // Bracket sign changes on a scan grid and refine each root by bisection.
    constexpr int scan = 720;
    double z0 = -z_max, f0 = inner(z0);
    for (int i = 1; i <= scan; ++i) {
        const double z1 = -z_max + 2.0 * z_max * i / scan;
        const double f1 = inner(z1);
        if ((f0 < 0.0) != (f1 < 0.0)) {
            double lo = z0, hi = z1;
            const bool lo_negative = f0 < 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((inner(mid) < 0.0) == lo_negative) lo = mid;
                else hi = mid;
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        z0 = z1;
        f0 = f1;
    }
    std::sort(cuts.begin(), cuts.end());

    const double df = std::exp(-pricer.r_D() * tau);
    const double tol = 1e-8 * (1.0 + std::abs(v));
    ThetaPair out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a <= 0.0) continue;
        const double piece = integrate_adaptive([&](double z) { return inner(z) * normal_pdf(z); }, a, b, tol);
        const double mid_value = inner(0.5 * (a + b));
        if (mid_value >= 0.0) out.plus += df * piece;
        else out.minus += df * piece;
    }
    return out;
}

inline double compound_theta(const ClaimSpec& claim, double r_D, double sigma, double t, double S, double s, int sign)
{
    const ThetaPair th = compound_theta(PublicPricer(claim, r_D, sigma), t, S, s);
    return sign >= 0 ? th.plus : th.minus;
}

inline PublicQuote public_quote(const PublicPricer& pricer, double t, double S, double s)
{
    const ThetaPair th = compound_theta(pricer, t, S, s);
    return {pricer.value(t, S), pricer.delta(t, S), th.plus, th.minus};
}

} // namespace xva
