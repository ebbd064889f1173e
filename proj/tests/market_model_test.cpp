#include <gtest/gtest.h>

#include <functional>
#include <limits>

#include "support.hpp"
#include "xva/market_model.hpp"

using namespace xva;

namespace {

MarketParams base()
{
    MarketParams m = test::admissible_asymmetric();
    return m;
}

} // namespace

TEST(MarketModel, AdmissibleSetPasses)
{
    const auto rep = validate(base());
    EXPECT_TRUE(rep.passed());
    EXPECT_TRUE(rep.violations.empty());
}

struct SingleViolation {
    std::string_view id;
    std::function<void(MarketParams&)> breach;
};

TEST(MarketModel, EachInequalityReportsItsOwnId)
{
    const std::vector<SingleViolation> cases{
        {violation_id::repo_lend_exceeds_funding_lend, [](MarketParams& m) { m.rates.r_r_plus = 0.036; }},
        {violation_id::funding_lend_exceeds_repo_borrow, [](MarketParams& m) { m.rates.r_r_minus = 0.034; }},
        {violation_id::funding_lend_exceeds_funding_borrow,
         [](MarketParams& m) {
             m.rates.r_f_minus = 0.0345;
             m.rates.r_c_minus = 0.02;
         }},
        // With r_D above r_f_minus the bond-return bound can fail on its own.
        {violation_id::investor_bond_return_too_low,
         [](MarketParams& m) {
             m.rates.r_D = 0.06;
             m.credit.r_I = 0.035;
         }},
        {violation_id::counterparty_bond_return_too_low,
         [](MarketParams& m) {
             m.rates.r_D = 0.06;
             m.credit.r_C = 0.025;
         }},
        {violation_id::collateral_rate_exceeds_funding_borrow, [](MarketParams& m) { m.rates.r_c_minus = 0.06; }},
        {violation_id::funding_borrow_exceeds_bond_return, [](MarketParams& m) { m.rates.r_f_minus = 0.14; }},
    };
    for (const auto& c : cases) {
        MarketParams m = base();
        c.breach(m);
        const auto rep = validate(m);
        ASSERT_EQ(rep.violations.size(), 1u) << c.id;
        EXPECT_EQ(rep.violations.front().id, c.id);
        EXPECT_TRUE(rep.contains(c.id));
        EXPECT_FALSE(rep.violations.front().inequality.empty());
    }
}

TEST(MarketModel, RepoLendAboveFundingBorrowIsFlagged)
{
    MarketParams m = base();
    m.rates.r_r_plus = 0.06;
    m.rates.r_f_plus = 0.06;
    m.rates.r_r_minus = 0.07;
    m.rates.r_f_minus = 0.055;
    const auto rep = validate(m);
    EXPECT_TRUE(rep.contains(violation_id::repo_lend_exceeds_funding_borrow));
}

TEST(MarketModel, BondChecksSkippedWithoutDefaults)
{
    MarketParams m = base();
    m.credit.r_I = 0.0;
    m.credit.r_C = 0.0;
    EXPECT_FALSE(validate(m).passed());
    m.credit.defaults_enabled = false;
    EXPECT_TRUE(validate(m).passed());
}

TEST(MarketModel, BondReturnBoundaryIsStrict)
{
    MarketParams m = base();
    m.credit.r_I = m.rates.r_f_plus - m.credit.h_I_P; // r_I + h_I_P == r_f_plus
    EXPECT_TRUE(validate(m).contains(violation_id::investor_bond_return_too_low));
}

TEST(MarketModel, NonFiniteInputThrows)
{
    MarketParams m = base();
    m.rates.r_f_plus = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate(m), InvalidInput);
    m = base();
    m.equity.sigma = std::numeric_limits<double>::infinity();
    EXPECT_THROW(check_structure(m), InvalidInput);
}

TEST(MarketModel, StructureChecks)
{
    MarketParams m = base();
    EXPECT_NO_THROW(check_structure(m));
    m.alpha = 1.2;
    EXPECT_THROW(check_structure(m), InvalidInput);
    m = base();
    m.credit.L_C = -0.1;
    EXPECT_THROW(check_structure(m), InvalidInput);
    m = base();
    m.equity.S0 = 0.0;
    EXPECT_THROW(check_structure(m), InvalidInput);
    m = base();
    m.equity.sigma = 0.0;
    EXPECT_THROW(check_structure(m), InvalidInput);
    m = base();
    m.credit.h_I_P = -0.01;
    EXPECT_THROW(check_structure(m), InvalidInput);
}

TEST(MarketModel, RiskNeutralIntensities)
{
    MarketParams m = base();
    const auto h = risk_neutral_intensities(m);
    EXPECT_NEAR(h.h_I, 0.11 - 0.03 + 0.02, 1e-15);
    EXPECT_NEAR(h.h_C, 0.12 - 0.03 + 0.03, 1e-15);
    m.credit.h_I_Q = 0.3;
    EXPECT_DOUBLE_EQ(risk_neutral_intensities(m).h_I, 0.3);
}

TEST(MarketModel, NonPositiveIntensityNamesTheParty)
{
    MarketParams m = base();
    m.credit.r_C = m.rates.r_D - m.credit.h_C_P;
    try {
        risk_neutral_intensities(m);
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("counterparty"), std::string::npos);
    }
    m.credit.defaults_enabled = false;
    const auto h = active_intensities(m);
    EXPECT_EQ(h.h_I, 0.0);
    EXPECT_EQ(h.h_C, 0.0);
}

TEST(MarketModel, OverrideResolutionIsConsistent)
{
    MarketParams m;
    m.rates = RateSet::flat(0.05);
    m.credit.h_I_Q = 0.15;
    m.credit.h_C_Q = 0.2;
    resolve_intensity_overrides(m, false, false);
    EXPECT_DOUBLE_EQ(m.credit.h_I_P, 0.15);
    EXPECT_DOUBLE_EQ(m.credit.r_I, 0.05);
    m.credit.h_I_Q.reset();
    m.credit.h_C_Q.reset();
    const auto h = risk_neutral_intensities(m);
    EXPECT_NEAR(h.h_I, 0.15, 1e-15);
    EXPECT_NEAR(h.h_C, 0.2, 1e-15);
}

TEST(MarketModel, Accounts)
{
    EXPECT_DOUBLE_EQ(account(0.05, 0.0), 1.0);
    EXPECT_NEAR(account(0.05, 2.0) * discount(0.05, 2.0), 1.0, 1e-15);
    EXPECT_NEAR(account(0.03, 1.5), std::exp(0.045), 1e-15);
}

TEST(MarketModel, LinearRateDetection)
{
    EXPECT_TRUE(has_linear_rates(RateSet::flat(0.02)));
    RateSet r = RateSet::flat(0.05);
    r.r_f_plus = r.r_f_minus = 0.08;
    r.r_c_plus = r.r_c_minus = 0.01;
    EXPECT_TRUE(has_linear_rates(r));
    r.r_f_minus = 0.09;
    EXPECT_FALSE(has_linear_rates(r));
    r = RateSet::flat(0.05);
    r.r_r_minus = 0.06;
    EXPECT_FALSE(has_linear_rates(r));
}
