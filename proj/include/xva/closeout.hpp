#pragma once

// Collateral rule and the risk-free closeout payment at the first default.

#include <algorithm>

#include "xva/errors.hpp"

namespace xva {

enum class Party { investor, counterparty, none };

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

// C = α·V̂; positive when the hedger posts.
inline double collateral(double alpha, double vhat) { return alpha * vhat; }

struct CloseoutInputs {
    double vhat = 0.0;
    double collateral = 0.0;
    double L_I = 0.0;
    double L_C = 0.0;
    double alpha = 0.0;
    Party first_defaulter = Party::none;
};

// θ = V̂ + 1{τ_C<τ_I} L_C (V̂−C)^− − 1{τ_I<τ_C} L_I (V̂−C)^+
inline double closeout_value(const CloseoutInputs& in)
{
    const double exposure = in.vhat - in.collateral;
    switch (in.first_defaulter) {
    case Party::counterparty: return in.vhat + in.L_C * negative_part(exposure);
    case Party::investor: return in.vhat - in.L_I * positive_part(exposure);
    case Party::none: break;
    }
    throw InvalidInput("closeout requires a defaulting party");
}

// The same payment in min/max form: the defaulter's claim is haircut only on
// the uncollateralized part, and only when the survivor is owed money.
inline double closeout_value_minmax(const CloseoutInputs& in)
{
    const double C = in.collateral;
    const double v = in.vhat;
    switch (in.first_defaulter) {
    case Party::investor: return std::min((1.0 - in.L_I) * (v - C) + C, v);
    case Party::counterparty: return std::max((1.0 - in.L_C) * (v - C) + C, v);
    case Party::none: break;
    }
    throw InvalidInput("closeout requires a defaulting party");
}

// Form obtained after substituting the collateral rule C = α·V̂, splitting on
// the sign of V̂ at the default time.
inline double closeout_value_collateral_rule(double vhat, double alpha, double L_I, double L_C, Party first)
{
    switch (first) {
    case Party::investor: return vhat >= 0.0 ? (1.0 - (1.0 - alpha) * L_I) * vhat : vhat;
    case Party::counterparty: return vhat < 0.0 ? (1.0 - (1.0 - alpha) * L_C) * vhat : vhat;
    case Party::none: break;
    }
    throw InvalidInput("closeout requires a defaulting party");
}

// θ_I(v) = v − L_I((1−α)v)^+ and θ_C(v) = v + L_C((1−α)v)^−.
inline double theta_party(Party party, double vhat, double alpha, double L)
{
    const double exposure = (1.0 - alpha) * vhat;
    switch (party) {
    case Party::investor: return vhat - L * positive_part(exposure);
    case Party::counterparty: return vhat + L * negative_part(exposure);
    case Party::none: break;
    }
    throw InvalidInput("theta_party requires a defaulting party");
}

inline double theta_investor(double vhat, double alpha, double L_I)
{
    return theta_party(Party::investor, vhat, alpha, L_I);
}
inline double theta_counterparty(double vhat, double alpha, double L_C)
{
    return theta_party(Party::counterparty, vhat, alpha, L_C);
}

} // namespace xva
