#pragma once

// Hedge positions and the account balances implied by them.

#include <cmath>

#include "xva/market_model.hpp"

namespace xva {

struct HedgeReport {
    double t = 0.0;
    double S = 0.0;
    double value = 0.0;          // replication value V_t
    double xi_stock = 0.0;       // stock shares
    double xi_bond_I = 0.0;      // own bond shares
    double xi_bond_C = 0.0;      // counterparty bond shares
    double psi_repo = 0.0;       // repo account shares, ψ^r B^{r_r} = −ξ S
    double xi_funding = 0.0;     // funding account shares
    double psi_collateral = 0.0; // collateral account shares, ψ^c B^{r_c} = −C
};

// Pre-default price of the zero-recovery bond of a name with Q-intensity h.
inline double bond_price(double r_D, double h, double t, double T) { return std::exp(-(r_D + h) * (T - t)); }

// Repo rate applicable to the cash leg of a stock position: a long position
// borrows cash (r_r^−), a short position lends it (r_r^+).
inline double repo_rate_for(const RateSet& r, double stock_position)
{
    return stock_position > 0.0 ? r.r_r_minus : r.r_r_plus;
}
inline double funding_rate_for(const RateSet& r, double balance) { return balance >= 0.0 ? r.r_f_plus : r.r_f_minus; }
inline double collateral_rate_for(const RateSet& r, double C) { return C >= 0.0 ? r.r_c_plus : r.r_c_minus; }

// Fills the repo, funding and collateral accounts from the risky positions so
// that the stock is fully repo-financed and the funding account absorbs the
// rest of the wealth.
inline HedgeReport assemble_hedge(const RateSet& rates, double t, double S, double value, double xi,
                                  double xi_I, double P_I, double xi_C, double P_C, double C)
{
    HedgeReport h;
    h.t = t;
    h.S = S;
    h.value = value;
    h.xi_stock = xi;
    h.xi_bond_I = xi_I;
    h.xi_bond_C = xi_C;
    const double stock = xi * S;
    h.psi_repo = -stock / account(repo_rate_for(rates, stock), t);
    const double balance = value - xi_I * P_I - xi_C * P_C - C;
    h.xi_funding = balance / account(funding_rate_for(rates, balance), t);
    h.psi_collateral = -C / account(collateral_rate_for(rates, C), t);
    return h;
}

} // namespace xva
