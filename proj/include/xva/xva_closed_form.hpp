#pragma once

// Closed-form valuation adjustments in the linear-rate regime: the
// default-free funding formula with its hedge, and the bilateral-default
// representation split into funding, DVA, CVA and collateral legs.

#include <cmath>

#include "xva/analytic_pricing.hpp"
#include "xva/closeout.hpp"
#include "xva/errors.hpp"
#include "xva/hedge.hpp"
#include "xva/market_model.hpp"
#include "xva/quadrature.hpp"

namespace xva {

struct XvaBreakdown {
    double total = 0.0;
    double funding_leg = 0.0;
    double dva_leg = 0.0;
    double cva_leg = 0.0;
    double collateral_leg = 0.0;
    double adjustment_factor = 1.0;
    double reference_value = 0.0; // V̂(t,S)

    double replication_value() const { return funding_leg + dva_leg + cva_leg + collateral_leg; }
};

struct ClosedFormOptions {
    // Use the h_C-based prefactor on the negative-exposure part of the
    // investor-default leg, as typeset in the source formulas. The default
    // uses h_I, which is what the backward equation produces.
    bool literal_dva_negative_prefactor = false;
    // Gauss–Legendre nodes in default time for mixed-sign payoffs.
    int time_nodes = 200;
};

namespace detail {

inline void require_linear(const MarketParams& p, const char* what)
{
    if (!has_linear_rates(p.rates)) {
        throw PreconditionError(std::string(what) +
                                " needs r_f+ = r_f-, r_c+ = r_c-, r_D = r_r+ = r_r-; use the backward solver instead");
    }
}

inline void require_time(double t, double T)
{
    if (!std::isfinite(t)) throw InvalidInput("non-finite valuation time");
    if (t < 0.0 || t > T) throw DomainError("valuation time outside [0, T]");
}

// ∫_0^Δ e^{κu} du with the κ → 0 limit taken when |κ| < 1e-12.
inline double exp_integral(double kappa, double horizon)
{
    if (std::abs(kappa) < 1e-12) return horizon;
    return std::expm1(kappa * horizon) / kappa;
}

inline void check_lemma_exclusions(double lambda, double h, double h_other)
{
    constexpr double tol = 1e-10;
    if (std::abs(lambda - h) < tol || std::abs(lambda - h_other) < tol || std::abs(lambda - h - h_other) < tol) {
        throw DomainError("funding spread coincides with a default intensity (or their sum); perturb the rates or "
                          "use the backward solver");
    }
}

} // namespace detail

// E[1{τ ≥ s} | τ ≥ t] = e^{−(h_I+h_C)(s−t)}.
inline double survival_expectation(double h_I, double h_C, double t, double s)
{
    if (!std::isfinite(h_I) || !std::isfinite(h_C) || !std::isfinite(t) || !std::isfinite(s)) {
        throw InvalidInput("non-finite survival argument");
    }
    if (s < t) throw DomainError("survival horizon s must not precede t");
    if (h_I < 0.0 || h_C < 0.0) throw InvalidInput("intensities must be non-negative");
    return std::exp(-(h_I + h_C) * (s - t));
}

// E[e^{λ(τ_1−t)} 1{t < τ_1 < τ_2 ∧ T}] for independent exponential τ_1, τ_2
// with intensities h_first, h_other, over the horizon T − t.
inline double first_default_functional(double lambda, double h_first, double h_other, double horizon)
{
    if (!std::isfinite(lambda) || !std::isfinite(h_first) || !std::isfinite(h_other) || !std::isfinite(horizon)) {
        throw InvalidInput("non-finite functional argument");
    }
    if (horizon < 0.0) throw DomainError("negative horizon");
    if (h_first < 0.0 || h_other < 0.0) throw InvalidInput("intensities must be non-negative");
    if (h_first == 0.0 || horizon == 0.0) return 0.0;
    detail::check_lemma_exclusions(lambda, h_first, h_other);
    const double a = lambda - h_first - h_other;
    const double bracket = h_other / a * std::expm1(a * horizon) - 1.0 +
                           std::exp(-h_other * horizon) * std::exp((lambda - h_first) * horizon);
    return h_first / (lambda - h_first) * bracket;
}

// Default-free funding adjustment; credit data is ignored.
inline XvaBreakdown piterbarg_xva(const MarketParams& params, const ClaimSpec& claim, double t, double S)
{
    detail::require_linear(params, "the default-free closed form");
    detail::require_time(t, claim.maturity);
    const auto& r = params.rates;
    const PublicPricer pricer(claim, r.r_D, params.equity.sigma);
    const double vhat = pricer.value(t, S);
    const double tau = claim.maturity - t;
    const double gap = r.r_r_plus - r.r_f_plus;
    const double growth = std::exp(gap * tau);
    const double integral = detail::exp_integral(gap, tau);

    XvaBreakdown out;
    out.reference_value = vhat;
    out.funding_leg = growth * vhat;
    out.collateral_leg = params.alpha * (r.r_f_plus - r.r_c_plus) * integral * vhat;
    out.adjustment_factor = growth + params.alpha * (r.r_f_plus - r.r_c_plus) * integral;
    out.total = (out.adjustment_factor - 1.0) * vhat;
    return out;
}

inline HedgeReport piterbarg_hedge(const MarketParams& params, const ClaimSpec& claim, double t, double S)
{
    const XvaBreakdown x = piterbarg_xva(params, claim, t, S);
    const PublicPricer pricer(claim, params.rates.r_D, params.equity.sigma);
    const double xi = x.adjustment_factor * pricer.delta(t, S);
    const double C = collateral(params.alpha, x.reference_value);
    return assemble_hedge(params.rates, t, S, x.adjustment_factor * x.reference_value, xi, 0.0, 0.0, 0.0, 0.0, C);
}

// Bilateral-default representation in the linear-rate regime.
//
// Sign-definite payoffs use the adjustment-factor formula term by term.
// Mixed-sign payoffs integrate the compound values Θ̂^{s,±} over the
// first-default time with Gauss–Legendre nodes.
inline XvaBreakdown default_xva(const MarketParams& params, const ClaimSpec& claim, double t, double S,
                                const ClosedFormOptions& opt = {})
{
    if (!params.credit.defaults_enabled) return piterbarg_xva(params, claim, t, S);
    detail::require_linear(params, "the default closed form");
    detail::require_time(t, claim.maturity);
    const auto& r = params.rates;
    const auto& c = params.credit;
    const Intensities h = risk_neutral_intensities(params);
    const double lambda = r.r_f_plus - r.r_D;
    detail::check_lemma_exclusions(lambda, h.h_I, h.h_C);

    const PublicPricer pricer(claim, r.r_D, params.equity.sigma);
    const double vhat = pricer.value(t, S);
    const double tau = claim.maturity - t;
    const double alpha = params.alpha;
    const double keep_I = 1.0 - (1.0 - alpha) * c.L_I; // fraction kept on investor default, positive exposure
    const double keep_C = 1.0 - (1.0 - alpha) * c.L_C;
    const double D = h.h_I + h.h_C - lambda;

    XvaBreakdown out;
    out.reference_value = vhat;
    // B_t^{r_f}/B_t^{r_D}·B_T^{r_D}/B_T^{r_f}·e^{(λ−h_I)Δ}e^{(λ−h_C)Δ}
    out.funding_leg = std::exp(-lambda * tau) * std::exp((lambda - h.h_I) * tau) * std::exp((lambda - h.h_C) * tau) * vhat;
    out.collateral_leg = alpha * (r.r_f_plus - r.r_c_plus) * detail::exp_integral(-D, tau) * vhat;

    const double pref_I = 1.0 + (r.r_D - r.r_f_plus) / h.h_I;
    const double pref_C = 1.0 + (r.r_D - r.r_f_plus) / h.h_C;
    const double pref_I_negative = opt.literal_dva_negative_prefactor ? pref_C : pref_I;

    const auto& payoff = pricer.payoff();
    if (payoff.nonnegative() || payoff.nonpositive()) {
        const double f_I = first_default_functional(lambda, h.h_I, h.h_C, tau);
        const double f_C = first_default_functional(lambda, h.h_C, h.h_I, tau);
        if (payoff.nonnegative()) {
            out.dva_leg = keep_I * pref_I * f_I * vhat;
            out.cva_leg = pref_C * f_C * vhat;
        } else {
            out.dva_leg = pref_I_negative * f_I * vhat;
            out.cva_leg = keep_C * pref_C * f_C * vhat;
        }
    } else {
        // ∫_0^Δ e^{−Du} Θ̂^{t+u,±} du; intensities and prefactors applied after.
        double plus = 0.0, minus = 0.0;
        const auto& rule = gauss_legendre(opt.time_nodes);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double u = 0.5 * tau * (rule.nodes[k] + 1.0);
            const double w = 0.5 * tau * rule.weights[k] * std::exp(-D * u);
            const ThetaPair th = compound_theta(pricer, t, S, t + u);
            plus += w * th.plus;
            minus += w * th.minus;
        }
        out.dva_leg = h.h_I * (pref_I * keep_I * plus + pref_I_negative * minus);
        out.cva_leg = h.h_C * pref_C * (plus + keep_C * minus);
    }
    out.total = out.replication_value() - vhat;
    out.adjustment_factor = vhat != 0.0 ? out.replication_value() / vhat : 1.0;
    return out;
}

// Stock and bond positions of the replicating strategy for sign-definite
// payoffs: ξ = A·V̂_S and ξ^i = (A·V̂ − θ_i(V̂))/P^i.
inline HedgeReport default_hedge(const MarketParams& params, const ClaimSpec& claim, double t, double S,
                                 const ClosedFormOptions& opt = {})
{
    detail::require_time(t, claim.maturity);
    const auto& r = params.rates;
    const PublicPricer pricer(claim, r.r_D, params.equity.sigma);
    if (!params.credit.defaults_enabled) return piterbarg_hedge(params, claim, t, S);
    const auto& payoff = pricer.payoff();
    if (!payoff.nonnegative() && !payoff.nonpositive()) {
        throw PreconditionError("closed-form default hedge needs a sign-definite payoff; use the backward solver");
    }
    const Intensities h = risk_neutral_intensities(params);
    const double T = claim.maturity;
    if (t >= T) {
        const double v = pricer.value(T, S);
        return assemble_hedge(r, t, S, v, pricer.delta(T, S), 0.0, 1.0, 0.0, 1.0, collateral(params.alpha, v));
    }
    const XvaBreakdown x = default_xva(params, claim, t, S, opt);
    const double A = x.adjustment_factor;
    const double v = x.reference_value;
    const double P_I = bond_price(r.r_D, h.h_I, t, T);
    const double P_C = bond_price(r.r_D, h.h_C, t, T);
    const double xi_I = (A * v - theta_investor(v, params.alpha, params.credit.L_I)) / P_I;
    const double xi_C = (A * v - theta_counterparty(v, params.alpha, params.credit.L_C)) / P_C;
    return assemble_hedge(r, t, S, A * v, A * pricer.delta(t, S), xi_I, P_I, xi_C, P_C, collateral(params.alpha, v));
}

} // namespace xva
