#pragma once

// Market parameters, risk-neutral intensities and the no-arbitrage rate checks.
//
// All rates are continuously compounded decimals per year. Instances are plain
// values; once validated they are shared read-only between workers.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xva/errors.hpp"

namespace xva {

struct RateSet {
    double r_f_plus = 0.05;  // funding, lend to treasury
    double r_f_minus = 0.05; // funding, borrow from treasury
    double r_r_plus = 0.05;  // repo, lend cash (short stock)
    double r_r_minus = 0.05; // repo, borrow cash (long stock)
    double r_c_plus = 0.05;  // collateral posted by the hedger
    double r_c_minus = 0.05; // collateral received by the hedger
    double r_D = 0.05;       // public discount rate of the valuation agent

    // Sets every rate to `r`.
    static RateSet flat(double r) { return {r, r, r, r, r, r, r}; }
};

struct CreditParams {
    double h_I_P = 0.0; // physical default intensities
    double h_C_P = 0.0;
    double r_I = 0.0; // bond return rates
    double r_C = 0.0;
    double L_I = 0.0; // loss rates
    double L_C = 0.0;
    std::optional<double> h_I_Q; // direct valuation-measure intensities
    std::optional<double> h_C_Q;
    // When false the contract can only terminate at maturity and no bonds are
    // traded (the default-free funding model).
    bool defaults_enabled = true;
};

struct EquityParams {
    double S0 = 100.0;
    double mu = 0.05;
    double sigma = 0.2;
};

struct MarketParams {
    RateSet rates;
    CreditParams credit;
    EquityParams equity;
    double alpha = 0.0; // collateralization level
};

struct Intensities {
    double h_I = 0.0;
    double h_C = 0.0;
};

struct Violation {
    std::string id;         // stable identifier
    std::string inequality; // the inequality that failed
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool passed() const { return violations.empty(); }
    bool contains(std::string_view id) const
    {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const Violation& v) { return v.id == id; });
    }
};

// Stable identifiers of the rate conditions checked by validate().
namespace violation_id {
inline constexpr std::string_view repo_lend_exceeds_funding_lend = "repo_lend_exceeds_funding_lend";
inline constexpr std::string_view funding_lend_exceeds_repo_borrow = "funding_lend_exceeds_repo_borrow";
inline constexpr std::string_view funding_lend_exceeds_funding_borrow = "funding_lend_exceeds_funding_borrow";
inline constexpr std::string_view investor_bond_return_too_low = "investor_bond_return_too_low";
inline constexpr std::string_view counterparty_bond_return_too_low = "counterparty_bond_return_too_low";
inline constexpr std::string_view collateral_rate_exceeds_funding_borrow = "collateral_rate_exceeds_funding_borrow";
inline constexpr std::string_view funding_borrow_exceeds_bond_return = "funding_borrow_exceeds_bond_return";
inline constexpr std::string_view repo_lend_exceeds_funding_borrow = "repo_lend_exceeds_funding_borrow";
} // namespace violation_id

inline double discount(double rate, double t) { return std::exp(-rate * t); }
inline double account(double rate, double t) { return std::exp(rate * t); }

namespace detail {

inline void require_finite(double x, const char* name)
{
    if (!std::isfinite(x)) {
        throw InvalidInput(std::string("non-finite market parameter: ") + name);
    }
}

inline void require_all_finite(const MarketParams& p)
{
    const auto& r = p.rates;
    require_finite(r.r_f_plus, "r_f_plus");
    require_finite(r.r_f_minus, "r_f_minus");
    require_finite(r.r_r_plus, "r_r_plus");
    require_finite(r.r_r_minus, "r_r_minus");
    require_finite(r.r_c_plus, "r_c_plus");
    require_finite(r.r_c_minus, "r_c_minus");
    require_finite(r.r_D, "r_D");
    const auto& c = p.credit;
    require_finite(c.h_I_P, "h_I_P");
    require_finite(c.h_C_P, "h_C_P");
    require_finite(c.r_I, "r_I");
    require_finite(c.r_C, "r_C");
    require_finite(c.L_I, "L_I");
    require_finite(c.L_C, "L_C");
    if (c.h_I_Q) require_finite(*c.h_I_Q, "h_I_Q");
    if (c.h_C_Q) require_finite(*c.h_C_Q, "h_C_Q");
    require_finite(p.equity.S0, "S0");
    require_finite(p.equity.mu, "mu");
    require_finite(p.equity.sigma, "sigma");
    require_finite(p.alpha, "alpha");
}

} // namespace detail

// Structural checks that are never overridable: ranges of loss rates,
// collateralization level, spot and volatility.
inline void check_structure(const MarketParams& p)
{
    detail::require_all_finite(p);
    if (p.equity.S0 <= 0.0) throw InvalidInput("S0 must be positive");
    if (p.equity.sigma <= 0.0) throw InvalidInput("sigma must be positive");
    if (p.alpha < 0.0 || p.alpha > 1.0) throw InvalidInput("alpha must lie in [0,1]");
    if (p.credit.L_I < 0.0 || p.credit.L_I > 1.0) throw InvalidInput("L_I must lie in [0,1]");
    if (p.credit.L_C < 0.0 || p.credit.L_C > 1.0) throw InvalidInput("L_C must lie in [0,1]");
    if (p.credit.h_I_P < 0.0 || p.credit.h_C_P < 0.0) {
        throw InvalidInput("physical default intensities must be non-negative");
    }
}

// Checks the no-arbitrage rate inequalities. Non-finite input throws
// InvalidInput; otherwise every failed inequality is listed once.
inline ValidationReport validate(const MarketParams& p)
{
    detail::require_all_finite(p);
    ValidationReport report;
    const auto& r = p.rates;
    const auto& c = p.credit;
    auto check = [&](bool ok, std::string_view id, std::string text) {
        if (!ok) report.violations.push_back({std::string(id), std::move(text)});
    };

    check(r.r_r_plus <= r.r_f_plus, violation_id::repo_lend_exceeds_funding_lend, "r_r_plus <= r_f_plus");
    check(r.r_f_plus <= r.r_r_minus, violation_id::funding_lend_exceeds_repo_borrow, "r_f_plus <= r_r_minus");
    check(r.r_f_plus <= r.r_f_minus, violation_id::funding_lend_exceeds_funding_borrow, "r_f_plus <= r_f_minus");
    check(r.r_r_plus <= r.r_f_minus, violation_id::repo_lend_exceeds_funding_borrow, "r_r_plus <= r_f_minus");
    check(std::max(r.r_c_plus, r.r_c_minus) <= r.r_f_minus, violation_id::collateral_rate_exceeds_funding_borrow,
          "max(r_c_plus, r_c_minus) <= r_f_minus");

    // Bond conditions only matter when the bonds are part of the market.
    if (c.defaults_enabled) {
        const double bond_I = c.r_I + c.h_I_P;
        const double bond_C = c.r_C + c.h_C_P;
        const double lend = std::max(r.r_f_plus, r.r_D);
        check(lend < bond_I, violation_id::investor_bond_return_too_low, "max(r_f_plus, r_D) < r_I + h_I_P");
        check(lend < bond_C, violation_id::counterparty_bond_return_too_low, "max(r_f_plus, r_D) < r_C + h_C_P");
        check(r.r_f_minus <= std::min(bond_I, bond_C), violation_id::funding_borrow_exceeds_bond_return,
              "r_f_minus <= min(r_I + h_I_P, r_C + h_C_P)");
    }
    return report;
}

// Valuation-measure default intensities h^Q = r^i - r_D + h^P, or the direct
// overrides when supplied. Throws if a resulting intensity is not positive.
inline Intensities risk_neutral_intensities(const MarketParams& p)
{
    const auto& c = p.credit;
    Intensities h;
    h.h_I = c.h_I_Q ? *c.h_I_Q : c.r_I - p.rates.r_D + c.h_I_P;
    h.h_C = c.h_C_Q ? *c.h_C_Q : c.r_C - p.rates.r_D + c.h_C_P;
    if (!(h.h_I > 0.0)) throw InvalidInput("non-positive valuation-measure default intensity for the investor");
    if (!(h.h_C > 0.0)) throw InvalidInput("non-positive valuation-measure default intensity for the counterparty");
    return h;
}

// Intensities seen by the engines: zero in the default-free model.
inline Intensities active_intensities(const MarketParams& p)
{
    if (!p.credit.defaults_enabled) return {};
    return risk_neutral_intensities(p);
}

// Makes the bond data consistent with directly supplied Q-intensities:
// h^P defaults to h^Q when absent and r^i = r_D + h^Q - h^P.
inline void resolve_intensity_overrides(MarketParams& p, bool h_I_P_given, bool h_C_P_given)
{
    auto& c = p.credit;
    if (c.h_I_Q) {
        if (!h_I_P_given) c.h_I_P = *c.h_I_Q;
        c.r_I = p.rates.r_D + *c.h_I_Q - c.h_I_P;
    }
    if (c.h_C_Q) {
        if (!h_C_P_given) c.h_C_P = *c.h_C_Q;
        c.r_C = p.rates.r_D + *c.h_C_Q - c.h_C_P;
    }
}

// True when the rates satisfy r_f+ = r_f-, r_c+ = r_c-, r_D = r_r+ = r_r-.
inline bool has_linear_rates(const RateSet& r, double tol = 1e-14)
{
    auto eq = [tol](double a, double b) { return std::abs(a - b) <= tol; };
    return eq(r.r_f_plus, r.r_f_minus) && eq(r.r_c_plus, r.r_c_minus) && eq(r.r_D, r.r_r_plus) &&
           eq(r.r_D, r.r_r_minus);
}

} // namespace xva
