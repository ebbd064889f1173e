#pragma once

// Backward solver for the nonlinear valuation equations with asymmetric
// funding, repo and collateral rates and bilateral default.
//
// Before the first default the value is a function v̄(t, S); at a default of
// name i it jumps to the closeout θ_i(V̂). Substituting Z = σ S v̄_S and
// Z^i = θ_i(V̂) − v̄ into the backward equation leaves a semilinear parabolic
// equation in x = log S,
//
//   v̄_t + (r_D − σ²/2) v̄_x + σ²/2 v̄_xx + Σ h_i (θ_i − v̄) + f(v̄, σ v̄_x, θ_I − v̄, θ_C − v̄; V̂) = 0,
//
// with v̄(T, ·) = Φ. The driver is piecewise linear: on each node the signs of
// the funding balance, the stock position and the collateral pick one rate
// out of each ± pair. Every time step freezes those choices from the current
// iterate, solves the resulting tridiagonal system, and repeats until the
// iterate stops moving.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "xva/analytic_pricing.hpp"
#include "xva/closeout.hpp"
#include "xva/errors.hpp"
#include "xva/hedge.hpp"
#include "xva/market_model.hpp"
#include "xva/parallel.hpp"

namespace xva {

enum class SolverSide { seller, buyer };

// implicit_euler is monotone and first order in time. rannacher runs
// Crank–Nicolson after four implicit half steps that damp the payoff kink.
enum class TimeScheme { implicit_euler, rannacher };

struct GridOptions {
    int n_time = 200;
    int n_space = 400; // rounded up to an even count so S0 sits on a node
    double width_sigmas = 6.0;
    double picard_tol = 1e-10;
    int picard_max = 50;
    TimeScheme scheme = TimeScheme::rannacher;
    // Start the backward sweep from cell averages of the payoff in log S,
    // which removes most of the error caused by a kink sitting on a node.
    // The stored terminal slice is always Φ(S_j) itself.
    bool smooth_terminal = true;
    // Also solve on a half-resolution grid and report |v̄_0 − v̄_0^{half}|.
    bool refinement = false;
    // When positive and refinement is on, a larger refinement delta adds a
    // warning to the diagnostics.
    double target_tolerance = 0.0;
};

struct Driver {
    SolverSide side = SolverSide::seller;
    RateSet rates;
    double alpha = 0.0;
    double sigma = 0.2;
    Intensities intensities;
};

// Seller driver f^+; the buyer driver is f^−(v,z,z^I,z^C;V̂) = −f^+(−v,−z,−z^I,−z^C;−V̂).
inline double driver_eval(const Driver& d, double /*t*/, double v, double z, double z_I, double z_C, double vhat)
{
    if (d.side == SolverSide::buyer) {
        Driver seller = d;
        seller.side = SolverSide::seller;
        return -driver_eval(seller, 0.0, -v, -z, -z_I, -z_C, -vhat);
    }
    const auto& r = d.rates;
    const double y = v + z_I + z_C - d.alpha * vhat;
    const double c = d.alpha * vhat;
    return -(r.r_f_plus * positive_part(y) - r.r_f_minus * negative_part(y) +
             (r.r_D - r.r_r_minus) * positive_part(z) / d.sigma - (r.r_D - r.r_r_plus) * negative_part(z) / d.sigma -
             r.r_D * z_I - r.r_D * z_C + r.r_c_plus * positive_part(c) - r.r_c_minus * negative_part(c));
}

struct GridDiagnostics {
    int max_picard_iterations = 0;
    long total_picard_iterations = 0;
    double refinement_delta = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;
};

// Output of one solve. Surfaces are stored level by level:
// index = k·(n_space+1) + j for time level k and log-price node j.
struct GridSolution {
    SolverSide side = SolverSide::seller;
    bool defaults_enabled = true;
    double maturity = 0.0;
    double sigma = 0.0;
    double r_D = 0.0;
    double S0 = 0.0;
    Intensities intensities;
    std::vector<double> times; // n_time + 1 levels, times[0] = 0, times.back() = T
    std::vector<double> x;     // n_space + 1 log-price nodes
    std::vector<double> v;     // pre-default value v̄
    std::vector<double> Z;     // σ S v̄_S
    std::vector<double> Z_I;   // θ_I(V̂) − v̄ (zero without defaults)
    std::vector<double> Z_C;   // θ_C(V̂) − v̄
    GridDiagnostics diagnostics;

    std::size_t n_time() const { return times.size() - 1; }
    std::size_t n_space() const { return x.size() - 1; }
    std::size_t index(std::size_t k, std::size_t j) const { return k * x.size() + j; }
    std::size_t center() const { return n_space() / 2; }
    double S_at(std::size_t j) const { return std::exp(x[j]); }
    double initial_value() const { return v[index(0, center())]; }

    // Bilinear interpolation in (t, log S). Throws outside the lattice.
    double interpolate(const std::vector<double>& surface, double t, double S) const
    {
        if (!std::isfinite(t) || !std::isfinite(S) || !(S > 0.0)) throw InvalidInput("non-finite lattice query");
        const double lx = std::log(S);
        if (t < times.front() || t > times.back()) throw DomainError("time outside the lattice");
        if (lx < x.front() - 1e-12 || lx > x.back() + 1e-12) throw DomainError("stock price outside the lattice");
        const double dt = times[1] - times[0];
        const double dx = x[1] - x[0];
        std::size_t k = std::min<std::size_t>(static_cast<std::size_t>((t - times.front()) / dt), n_time() - 1);
        std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, (lx - x.front()) / dx)), n_space() - 1);
        const double wt = std::clamp((t - times[k]) / dt, 0.0, 1.0);
        const double wx = std::clamp((lx - x[j]) / dx, 0.0, 1.0);
        const double a = surface[index(k, j)] * (1 - wx) + surface[index(k, j + 1)] * wx;
        const double b = surface[index(k + 1, j)] * (1 - wx) + surface[index(k + 1, j + 1)] * wx;
        return a * (1 - wt) + b * wt;
    }
    double value_at(double t, double S) const { return interpolate(v, t, S); }
};

namespace detail {

// Thomas algorithm; a: sub-diagonal, b: diagonal, c: super-diagonal.
inline void solve_tridiagonal(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                              std::vector<double>& d, std::vector<double>& scratch)
{
    const std::size_t n = b.size();
    scratch.resize(n);
    double beta = b[0];
    if (beta == 0.0) throw NumericalError("singular tridiagonal system");
    d[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = c[i - 1] / beta;
        beta = b[i] - a[i] * scratch[i];
        if (beta == 0.0) throw NumericalError("singular tridiagonal system");
        d[i] = (d[i] - a[i] * d[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= scratch[i + 1] * d[i + 1];
}

// Mean of Φ(e^x) over [l, u], exact for the canonical linear payoff.
inline double cell_average(const LinearPayoff& p, double l, double u)
{
    double integral = p.a * (u - l) + p.b * (std::exp(u) - std::exp(l));
    for (const auto& [K, c] : p.kinks) {
        const double lk = std::log(K);
        if (lk >= u) continue;
        const double from = std::max(l, lk);
        integral += c * (std::exp(u) - std::exp(from) - K * (u - from));
    }
    return integral / (u - l);
}

class LatticeSolver {
public:
    LatticeSolver(const ClaimSpec& claim, const MarketParams& params, SolverSide side, const GridOptions& opt)
        : pricer_(claim, params.rates.r_D, params.equity.sigma), params_(params), opt_(opt),
          sign_(side == SolverSide::seller ? 1.0 : -1.0), defaults_(params.credit.defaults_enabled)
    {
        check_structure(params);
        if (opt.n_time < 1 || opt.n_space < 4) throw InvalidInput("grid needs n_time >= 1 and n_space >= 4");
        if (!(opt.width_sigmas > 0.0) || !std::isfinite(opt.width_sigmas)) throw InvalidInput("width_sigmas must be positive");
        if (!(opt.picard_tol > 0.0) || opt.picard_max < 1) throw InvalidInput("invalid Picard settings");
        h_ = active_intensities(params);
        sigma_ = params.equity.sigma;
        T_ = claim.maturity;

        const int ns = opt.n_space + (opt.n_space % 2);
        const double half_width = opt.width_sigmas * sigma_ * std::sqrt(T_);
        const double x0 = std::log(params.equity.S0);
        dx_ = 2.0 * half_width / ns;
        x_.resize(ns + 1);
        for (int j = 0; j <= ns; ++j) x_[j] = x0 - half_width + j * dx_;
        x_[ns / 2] = x0;
        S_.resize(ns + 1);
        for (int j = 0; j <= ns; ++j) S_[j] = std::exp(x_[j]);
        const std::size_t n = x_.size();
        lower_.resize(n);
        diag_.resize(n);
        upper_.resize(n);
        coef_.resize(n);
        vhat_.resize(n);
        th_I_.resize(n);
        th_C_.resize(n);
    }

    GridSolution run()
    {
        GridSolution sol;
        sol.side = sign_ > 0 ? SolverSide::seller : SolverSide::buyer;
        sol.defaults_enabled = defaults_;
        sol.maturity = T_;
        sol.sigma = sigma_;
        sol.r_D = params_.rates.r_D;
        sol.S0 = params_.equity.S0;
        sol.intensities = h_;
        sol.x = x_;
        const int nt = opt_.n_time;
        const std::size_t n = x_.size();
        sol.times.resize(nt + 1);
        for (int k = 0; k <= nt; ++k) sol.times[k] = T_ * k / nt;
        sol.times[nt] = T_;
        sol.v.assign((nt + 1) * n, 0.0);

        std::vector<double> cur(n);
        for (std::size_t j = 0; j < n; ++j) cur[j] = pricer_.payoff()(S_[j]);
        std::copy(cur.begin(), cur.end(), sol.v.begin() + nt * n);
        if (opt_.smooth_terminal) {
            for (std::size_t j = 0; j < n; ++j) cur[j] = cell_average(pricer_.payoff(), x_[j] - 0.5 * dx_, x_[j] + 0.5 * dx_);
        }

        for (int k = nt - 1; k >= 0; --k) {
            const double t_hi = sol.times[k + 1];
            const double t_lo = sol.times[k];
            const bool smoothing = opt_.scheme == TimeScheme::implicit_euler || k >= nt - 2;
            if (smoothing && opt_.scheme == TimeScheme::rannacher) {
                const double t_mid = 0.5 * (t_lo + t_hi);
                cur = step(cur, t_hi, t_mid, 1.0, sol.diagnostics);
                cur = step(cur, t_mid, t_lo, 1.0, sol.diagnostics);
            } else {
                cur = step(cur, t_hi, t_lo, smoothing ? 1.0 : 0.5, sol.diagnostics);
            }
            std::copy(cur.begin(), cur.end(), sol.v.begin() + k * n);
        }
        fill_integrands(sol);
        return sol;
    }

private:
    struct NodeCoefficients {
        double drift = 0.0; // first-order coefficient in x
        double kappa = 0.0; // reaction
        double source = 0.0;
    };

    void load_level(double t)
    {
        const double alpha = params_.alpha;
        for (std::size_t j = 0; j < x_.size(); ++j) {
            const double vh = pricer_.value(t, S_[j]);
            vhat_[j] = vh;
            th_I_[j] = theta_investor(vh, alpha, params_.credit.L_I);
            th_C_[j] = theta_counterparty(vh, alpha, params_.credit.L_C);
        }
    }

    double slope(const std::vector<double>& w, std::size_t j) const
    {
        const std::size_t last = w.size() - 1;
        if (j == 0) return (w[1] - w[0]) / dx_;
        if (j == last) return (w[last] - w[last - 1]) / dx_;
        return (w[j + 1] - w[j - 1]) / (2.0 * dx_);
    }

    // Rates selected by the signs of the current iterate at node j.
    NodeCoefficients coefficients(const std::vector<double>& w, std::size_t j) const
    {
        const auto& r = params_.rates;
        const double c = params_.alpha * vhat_[j];
        const double y = defaults_ ? th_I_[j] + th_C_[j] - w[j] - c : w[j] - c;
        const double z = sigma_ * slope(w, j);
        const double rf = sign_ * y >= 0.0 ? r.r_f_plus : r.r_f_minus;
        const double rr = sign_ * z > 0.0 ? r.r_r_minus : r.r_r_plus;
        const double rc = sign_ * c >= 0.0 ? r.r_c_plus : r.r_c_minus;
        NodeCoefficients nc;
        nc.drift = rr;
        if (defaults_) {
            nc.kappa = h_.h_I + h_.h_C + 2.0 * r.r_D - rf;
            nc.source = (h_.h_I + r.r_D - rf) * th_I_[j] + (h_.h_C + r.r_D - rf) * th_C_[j] + (rf - rc) * c;
        } else {
            nc.kappa = rf;
            nc.source = (rf - rc) * c;
        }
        return nc;
    }

    // Row j of the spatial operator A (without the source) as (lower, diag, upper).
    void operator_row(std::size_t j, const NodeCoefficients& nc, double& lo, double& di, double& up) const
    {
        const std::size_t last = x_.size() - 1;
        // Boundary rows impose V_SS = 0, which leaves only the drift r S V_S.
        if (j == 0) {
            lo = 0.0;
            di = -nc.drift / dx_ - nc.kappa;
            up = nc.drift / dx_;
            return;
        }
        if (j == last) {
            lo = -nc.drift / dx_;
            di = nc.drift / dx_ - nc.kappa;
            up = 0.0;
            return;
        }
        const double diff = 0.5 * sigma_ * sigma_ / (dx_ * dx_);
        const double adv = (nc.drift - 0.5 * sigma_ * sigma_) / (2.0 * dx_);
        lo = diff - adv;
        di = -2.0 * diff - nc.kappa;
        up = diff + adv;
    }

    // (A w + q)(t) with the rates chosen from w itself.
    std::vector<double> apply(const std::vector<double>& w) const
    {
        std::vector<double> out(w.size());
        const std::size_t last = w.size() - 1;
        for (std::size_t j = 0; j <= last; ++j) {
            const NodeCoefficients nc = coefficients(w, j);
            double lo, di, up;
            operator_row(j, nc, lo, di, up);
            out[j] = di * w[j] + nc.source;
            if (j > 0) out[j] += lo * w[j - 1];
            if (j < last) out[j] += up * w[j + 1];
        }
        return out;
    }

    // One step from t_hi back to t_lo with weight `theta` on the implicit level.
    std::vector<double> step(const std::vector<double>& v_hi, double t_hi, double t_lo, double theta,
                             GridDiagnostics& diag)
    {
        const double dt = t_hi - t_lo;
        const std::size_t n = v_hi.size();
        std::vector<double> rhs_base = v_hi;
        if (theta < 1.0) {
            load_level(t_hi);
            const std::vector<double> av = apply(v_hi);
            for (std::size_t j = 0; j < n; ++j) rhs_base[j] += (1.0 - theta) * dt * av[j];
        }
        load_level(t_lo);

        std::vector<double> w = v_hi;
        std::vector<double> next(n);
        for (int it = 1; it <= opt_.picard_max; ++it) {
            for (std::size_t j = 0; j < n; ++j) {
                const NodeCoefficients nc = coefficients(w, j);
                double lo, di, up;
                operator_row(j, nc, lo, di, up);
                lower_[j] = -theta * dt * lo;
                diag_[j] = 1.0 - theta * dt * di;
                upper_[j] = -theta * dt * up;
                next[j] = rhs_base[j] + theta * dt * nc.source;
            }
            solve_tridiagonal(lower_, diag_, upper_, next, coef_);
            double change = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                change = std::max(change, std::abs(next[j] - w[j]) / std::max(1.0, std::abs(next[j])));
            }
            w.swap(next);
            diag.total_picard_iterations += 1;
            diag.max_picard_iterations = std::max(diag.max_picard_iterations, it);
            if (change < opt_.picard_tol) return w;
        }
        throw NumericalError("Picard iteration did not converge within " + std::to_string(opt_.picard_max) +
                             " iterations at t = " + std::to_string(t_lo));
    }

    void fill_integrands(GridSolution& sol)
    {
        const std::size_t n = x_.size();
        const std::size_t levels = sol.times.size();
        sol.Z.assign(levels * n, 0.0);
        sol.Z_I.assign(levels * n, 0.0);
        sol.Z_C.assign(levels * n, 0.0);
        std::vector<double> w(n);
        for (std::size_t k = 0; k < levels; ++k) {
            std::copy(sol.v.begin() + k * n, sol.v.begin() + (k + 1) * n, w.begin());
            load_level(sol.times[k]);
            for (std::size_t j = 0; j < n; ++j) {
                sol.Z[k * n + j] = sigma_ * slope(w, j);
                if (defaults_) {
                    sol.Z_I[k * n + j] = th_I_[j] - w[j];
                    sol.Z_C[k * n + j] = th_C_[j] - w[j];
                }
            }
        }
    }

    PublicPricer pricer_;
    MarketParams params_;
    GridOptions opt_;
    double sign_;
    bool defaults_;
    Intensities h_;
    double sigma_ = 0.0;
    double T_ = 0.0;
    double dx_ = 0.0;
    std::vector<double> x_, S_;
    std::vector<double> lower_, diag_, upper_, coef_;
    std::vector<double> vhat_, th_I_, th_C_;
};

} // namespace detail

// Pre-default value surface and integrands for the seller or buyer equation.
inline GridSolution solve(const ClaimSpec& claim, const MarketParams& params, SolverSide side,
                          const GridOptions& opt = {})
{
    GridSolution sol = detail::LatticeSolver(claim, params, side, opt).run();
    if (opt.refinement) {
        GridOptions coarse = opt;
        coarse.refinement = false;
        coarse.n_time = std::max(1, opt.n_time / 2);
        coarse.n_space = std::max(4, (opt.n_space / 2) + ((opt.n_space / 2) % 2));
        const GridSolution half = detail::LatticeSolver(claim, params, side, coarse).run();
        sol.diagnostics.refinement_delta = std::abs(sol.initial_value() - half.initial_value());
        if (opt.target_tolerance > 0.0 && sol.diagnostics.refinement_delta > opt.target_tolerance) {
            sol.diagnostics.warnings.push_back("refinement delta " + std::to_string(sol.diagnostics.refinement_delta) +
                                               " exceeds target tolerance " + std::to_string(opt.target_tolerance));
        }
    }
    return sol;
}

struct IntervalReport {
    double V0_minus = 0.0;
    double V0_plus = 0.0;
    double xva_buy = 0.0;
    double xva_sell = 0.0;
    double width = 0.0;
    double vhat = 0.0;
    double grid_error = std::numeric_limits<double>::quiet_NaN();
};

// Seller and buyer prices of Φ. Both sides settle defaults with the same
// closeout θ(V̂) of Φ; only the driver differs. The two solves run
// concurrently.
inline IntervalReport interval(const ClaimSpec& claim, const MarketParams& params, const GridOptions& opt = {})
{
    GridSolution sols[2];
    const SolverSide sides[2] = {SolverSide::seller, SolverSide::buyer};
    parallel_for(2, [&](std::size_t i) { sols[i] = solve(claim, params, sides[i], opt); });
    IntervalReport rep;
    rep.V0_plus = sols[0].initial_value();
    rep.V0_minus = sols[1].initial_value();
    rep.vhat = public_value(claim, params.rates.r_D, params.equity.sigma, 0.0, params.equity.S0);
    rep.xva_sell = rep.V0_plus - rep.vhat;
    rep.xva_buy = rep.V0_minus - rep.vhat;
    rep.width = rep.V0_plus - rep.V0_minus;
    if (opt.refinement) {
        rep.grid_error = std::max(sols[0].diagnostics.refinement_delta, sols[1].diagnostics.refinement_delta);
    }
    return rep;
}

// Replicating positions read off the lattice: ξ = Z/(σS), ξ^i = −Z^i/P^i.
inline HedgeReport extract_hedge(const GridSolution& sol, const MarketParams& params, const ClaimSpec& claim,
                                 double t, double S)
{
    if (!(t < sol.maturity)) throw DomainError("hedge extraction needs t < T");
    const double v = sol.interpolate(sol.v, t, S);
    const double Z = sol.interpolate(sol.Z, t, S);
    const double xi = Z / (sol.sigma * S);
    double xi_I = 0.0, xi_C = 0.0, P_I = 0.0, P_C = 0.0;
    if (sol.defaults_enabled) {
        P_I = bond_price(sol.r_D, sol.intensities.h_I, t, sol.maturity);
        P_C = bond_price(sol.r_D, sol.intensities.h_C, t, sol.maturity);
        xi_I = -sol.interpolate(sol.Z_I, t, S) / P_I;
        xi_C = -sol.interpolate(sol.Z_C, t, S) / P_C;
    }
    const double C = collateral(params.alpha, public_value(claim, sol.r_D, sol.sigma, t, S));
    return assemble_hedge(params.rates, t, S, v, xi, xi_I, P_I, xi_C, P_C, C);
}

} // namespace xva
