// Values an at-the-money call with bilateral default risk by all three
// routes and prints the replicating portfolio.

#include <cstdio>

#include "xva/xva.hpp"

int main()
{
    xva::MarketParams m;
    m.rates = xva::RateSet::flat(0.05);
    m.rates.r_f_plus = m.rates.r_f_minus = 0.08;
    m.rates.r_c_plus = m.rates.r_c_minus = 0.01;
    m.credit.r_I = m.credit.r_C = 0.05;
    m.credit.h_I_Q = 0.15;
    m.credit.h_C_Q = 0.2;
    m.credit.L_I = m.credit.L_C = 0.5;
    xva::resolve_intensity_overrides(m, false, false);
    m.alpha = 0.25;
    const auto claim = xva::ClaimSpec::call(100.0, 1.0);

    const auto cf = xva::default_xva(m, claim, 0.0, m.equity.S0);
    std::printf("closed form  XVA %.6f  (funding %.4f, dva %.4f, cva %.4f, collateral %.4f)\n", cf.total,
                cf.funding_leg, cf.dva_leg, cf.cva_leg, cf.collateral_leg);

    const auto sol = xva::solve(claim, m, xva::SolverSide::seller);
    std::printf("lattice      XVA %.6f\n", sol.initial_value() - cf.reference_value);

    const auto paths = xva::simulate(m, claim, 100000, 250, 7);
    const auto mc = xva::estimate_representation(paths, m, claim);
    std::printf("Monte Carlo  XVA %.6f +- %.6f\n", mc.total.value, mc.total.se);

    const auto h = xva::default_hedge(m, claim, 0.0, m.equity.S0);
    std::printf("hedge: stock %.4f, own bond %.4f, counterparty bond %.4f, funding %.4f\n", h.xi_stock, h.xi_bond_I,
                h.xi_bond_C, h.xi_funding);
}
