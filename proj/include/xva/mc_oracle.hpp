#pragma once

// Monte Carlo oracle under the valuation measure: exact log-normal stock
// paths, independent exponential default times, and pathwise estimators of
// the four-leg representation and of bilateral CVA/DVA.
//
// Every path owns a counter-based random stream keyed by (seed, path), so a
// bundle is bit-identical for any number of workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "xva/analytic_pricing.hpp"
#include "xva/closeout.hpp"
#include "xva/errors.hpp"
#include "xva/market_model.hpp"
#include "xva/parallel.hpp"
#include "xva/xva_closed_form.hpp"

namespace xva {

// SplitMix64 stream with Box–Muller normals.
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint64_t path) : state_(mix(seed ^ mix(path + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }
    // Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct McOptions {
    bool antithetic = false;
    // Largest allowed n_paths·(n_steps+1).
    double max_cells = 1.0e8;
    // Resolution of τ_I = τ_C before maturity, which has probability zero.
    Party tie_break = Party::counterparty;
};

struct PathBundle {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    bool antithetic = false;
    double maturity = 0.0;
    std::vector<double> S;     // n_paths × (n_steps+1), row per path
    std::vector<double> tau_I; // +∞ when that name cannot default
    std::vector<double> tau_C;
    std::vector<double> tau;   // τ_I ∧ τ_C ∧ T
    std::vector<double> S_tau; // stock at τ (bridge-sampled between grid times)
    std::vector<Party> first;  // none when τ = T

    double dt() const { return maturity / static_cast<double>(n_steps); }
    double time(std::size_t k) const { return maturity * static_cast<double>(k) / static_cast<double>(n_steps); }
    double stock(std::size_t path, std::size_t k) const { return S[path * (n_steps + 1) + k]; }
};

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t n_effective = 0;
};

inline double combined_se(const McEstimate& a, const McEstimate& b) { return std::hypot(a.se, b.se); }

struct McXvaBreakdown {
    McEstimate total;
    McEstimate funding_leg;
    McEstimate dva_leg;
    McEstimate cva_leg;
    McEstimate collateral_leg;
    double reference_value = 0.0;
};

struct CvaDva {
    McEstimate cva;
    McEstimate dva;
};

namespace detail {

// Sum by recursive halving so the rounding pattern depends only on n.
inline double pairwise_sum(const double* x, std::size_t n)
{
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

// Mean and standard error; antithetic pairs are averaged first.
inline McEstimate summarize(const std::vector<double>& samples, bool antithetic)
{
    std::vector<double> s;
    if (antithetic) {
        s.resize(samples.size() / 2);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.5 * (samples[2 * i] + samples[2 * i + 1]);
    } else {
        s = samples;
    }
    const std::size_t n = s.size();
    McEstimate e;
    e.n_effective = n;
    if (n == 0) return e;
    e.value = pairwise_sum(s.data(), n) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = (s[i] - e.value) * (s[i] - e.value);
        const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
        e.se = std::sqrt(var / static_cast<double>(n));
    }
    return e;
}

inline void require_mc_linear(const MarketParams& p)
{
    if (!has_linear_rates(p.rates)) {
        throw PreconditionError("the Monte Carlo representation needs linear rates; use the backward solver");
    }
}

constexpr std::size_t block_size = 1024;

} // namespace detail

inline PathBundle simulate(const MarketParams& params, const ClaimSpec& claim, std::size_t n_paths, std::size_t n_steps,
                           std::uint64_t seed, const McOptions& opt = {})
{
    check_structure(params);
    if (n_paths < 2) throw InvalidInput("need at least two paths");
    if (n_steps < 1) throw InvalidInput("need at least one time step");
    if (opt.antithetic && n_paths % 2 != 0) throw InvalidInput("antithetic sampling needs an even path count");
    if (static_cast<double>(n_paths) * static_cast<double>(n_steps + 1) > opt.max_cells) {
        throw NumericalError("path bundle exceeds the configured resource cap");
    }
    if (!(claim.maturity > 0.0) || !std::isfinite(claim.maturity)) throw InvalidInput("maturity must be positive");
    const Intensities h = active_intensities(params);

    PathBundle b;
    b.n_paths = n_paths;
    b.n_steps = n_steps;
    b.seed = seed;
    b.antithetic = opt.antithetic;
    b.maturity = claim.maturity;
    b.S.resize(n_paths * (n_steps + 1));
    b.tau_I.resize(n_paths);
    b.tau_C.resize(n_paths);
    b.tau.resize(n_paths);
    b.S_tau.resize(n_paths);
    b.first.resize(n_paths);

    const double T = claim.maturity;
    const double dt = T / static_cast<double>(n_steps);
    const double sigma = params.equity.sigma;
    const double drift = (params.rates.r_D - 0.5 * sigma * sigma) * dt;
    const double vol = sigma * std::sqrt(dt);
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t blocks = (n_paths + detail::block_size - 1) / detail::block_size;

    parallel_for(blocks, [&](std::size_t blk) {
        const std::size_t end = std::min(n_paths, (blk + 1) * detail::block_size);
        std::vector<double> logs(n_steps + 1);
        for (std::size_t p = blk * detail::block_size; p < end; ++p) {
            const std::uint64_t stream_id = opt.antithetic ? p / 2 : p;
            const double sgn = (opt.antithetic && (p % 2 == 1)) ? -1.0 : 1.0;
            PathStream rng(seed, stream_id);
            double* row = &b.S[p * (n_steps + 1)];
            logs[0] = std::log(params.equity.S0);
            row[0] = params.equity.S0;
            for (std::size_t k = 1; k <= n_steps; ++k) {
                logs[k] = logs[k - 1] + drift + vol * sgn * rng.normal();
                row[k] = std::exp(logs[k]);
            }
            const double u_I = rng.uniform();
            const double u_C = rng.uniform();
            const double bridge = sgn * rng.normal();
            const double tI = h.h_I > 0.0 ? -std::log(u_I) / h.h_I : inf;
            const double tC = h.h_C > 0.0 ? -std::log(u_C) / h.h_C : inf;
            b.tau_I[p] = tI;
            b.tau_C[p] = tC;
            const double t_first = std::min(tI, tC);
            if (t_first >= T) {
                b.tau[p] = T;
                b.first[p] = Party::none;
                b.S_tau[p] = row[n_steps];
                continue;
            }
            b.tau[p] = t_first;
            if (tI < tC) b.first[p] = Party::investor;
            else if (tC < tI) b.first[p] = Party::counterparty;
            else b.first[p] = opt.tie_break;
            const std::size_t k = std::min(n_steps - 1, static_cast<std::size_t>(t_first / dt));
            const double t0 = dt * static_cast<double>(k);
            const double w = std::clamp((t_first - t0) / dt, 0.0, 1.0);
            const double mean = logs[k] + w * (logs[k + 1] - logs[k]);
            const double var = sigma * sigma * (t_first - t0) * std::max(0.0, t0 + dt - t_first) / dt;
            b.S_tau[p] = std::exp(mean + std::sqrt(std::max(0.0, var)) * bridge);
        }
    });
    return b;
}

// Fraction of paths with τ_I ∧ τ_C ≥ s.
inline McEstimate survival_fraction(const PathBundle& b, double s)
{
    std::vector<double> x(b.n_paths);
    for (std::size_t p = 0; p < b.n_paths; ++p) x[p] = std::min(b.tau_I[p], b.tau_C[p]) >= s ? 1.0 : 0.0;
    return detail::summarize(x, b.antithetic);
}

// Fraction of paths on which `party` defaults first before maturity.
inline McEstimate first_default_fraction(const PathBundle& b, Party party)
{
    std::vector<double> x(b.n_paths);
    for (std::size_t p = 0; p < b.n_paths; ++p) x[p] = b.first[p] == party ? 1.0 : 0.0;
    return detail::summarize(x, b.antithetic);
}

// Pathwise estimate at t = 0 of the four legs, with the weight
// Γ_0^s = (1 − λ/h_I)^{H^I} (1 − λ/h_C)^{H^C} e^{2λ(s∧τ)}, λ = r_f − r_D.
// Without defaults Γ ≡ 1 and every path survives to maturity.
inline McXvaBreakdown estimate_representation(const PathBundle& b, const MarketParams& params, const ClaimSpec& claim)
{
    detail::require_mc_linear(params);
    if (std::abs(claim.maturity - b.maturity) > 1e-14) throw InvalidInput("bundle maturity differs from the claim");
    const bool defaults = params.credit.defaults_enabled;
    const Intensities h = active_intensities(params);
    const auto& r = params.rates;
    const double rf = r.r_f_plus;
    const double lambda = rf - r.r_D;
    const double growth = defaults ? 2.0 * lambda : 0.0;
    const double alpha = params.alpha;
    const double keep_I = 1.0 - (1.0 - alpha) * params.credit.L_I;
    const double keep_C = 1.0 - (1.0 - alpha) * params.credit.L_C;
    const double jump_I = defaults ? 1.0 - lambda / h.h_I : 1.0;
    const double jump_C = defaults ? 1.0 - lambda / h.h_C : 1.0;
    const double coll_rate = alpha * (rf - r.r_c_plus);
    const PublicPricer pricer(claim, r.r_D, params.equity.sigma);
    const double vhat0 = pricer.value(0.0, params.equity.S0);
    const std::size_t N = b.n_paths, M = b.n_steps;
    const double dt = b.dt();

    std::vector<double> funding(N), dva(N), cva(N), coll(N), total(N), control(N);
    const double disc_D = std::exp(-r.r_D * b.maturity);
    const std::size_t blocks = (N + detail::block_size - 1) / detail::block_size;
    parallel_for(blocks, [&](std::size_t blk) {
        const std::size_t end = std::min(N, (blk + 1) * detail::block_size);
        for (std::size_t p = blk * detail::block_size; p < end; ++p) {
            const double tau = b.tau[p];
            auto weight = [&](double s) { return std::exp((growth - rf) * s); };
            double f = 0.0, d = 0.0, c = 0.0;
            switch (b.first[p]) {
            case Party::none: f = weight(b.maturity) * pricer.payoff()(b.stock(p, M)); break;
            case Party::investor: {
                const double v = pricer.value(tau, b.S_tau[p]);
                d = jump_I * weight(tau) * (v >= 0.0 ? keep_I * v : v);
                break;
            }
            case Party::counterparty: {
                const double v = pricer.value(tau, b.S_tau[p]);
                c = jump_C * weight(tau) * (v < 0.0 ? keep_C * v : v);
                break;
            }
            }
            double col = 0.0;
            if (coll_rate != 0.0) {
                double g_prev = weight(0.0) * pricer.value(0.0, b.stock(p, 0));
                std::size_t k = 0;
                for (; k < M && b.time(k + 1) <= tau; ++k) {
                    const double g = weight(b.time(k + 1)) * pricer.value(b.time(k + 1), b.stock(p, k + 1));
                    col += 0.5 * dt * (g_prev + g);
                    g_prev = g;
                }
                const double t_k = b.time(k);
                if (tau > t_k) col += 0.5 * (tau - t_k) * (g_prev + weight(tau) * pricer.value(tau, b.S_tau[p]));
                col *= coll_rate;
            }
            funding[p] = f;
            dva[p] = d;
            cva[p] = c;
            coll[p] = col;
            total[p] = f + d + c + col;
            control[p] = disc_D * pricer.payoff()(b.stock(p, M));
        }
    });
    // The total uses the discounted payoff, whose mean is V̂ exactly, as a
    // control variate. When nothing adjusts the price the two coincide path
    // by path and the estimate is exactly zero.
    const double mx = detail::pairwise_sum(total.data(), N) / static_cast<double>(N);
    const double my = detail::pairwise_sum(control.data(), N) / static_cast<double>(N);
    std::vector<double> sxy(N), syy(N);
    for (std::size_t p = 0; p < N; ++p) {
        sxy[p] = (total[p] - mx) * (control[p] - my);
        syy[p] = (control[p] - my) * (control[p] - my);
    }
    const double vyy = detail::pairwise_sum(syy.data(), N);
    const double beta = vyy > 0.0 ? detail::pairwise_sum(sxy.data(), N) / vyy : 0.0;
    for (std::size_t p = 0; p < N; ++p) total[p] = (total[p] - beta * control[p]) - (1.0 - beta) * vhat0;
    McXvaBreakdown out;
    out.reference_value = vhat0;
    out.funding_leg = detail::summarize(funding, b.antithetic);
    out.dva_leg = detail::summarize(dva, b.antithetic);
    out.cva_leg = detail::summarize(cva, b.antithetic);
    out.collateral_leg = detail::summarize(coll, b.antithetic);
    out.total = detail::summarize(total, b.antithetic);
    return out;
}

// Bilateral adjustments when every rate is the same:
// DVA = E[1{τ_I first, τ<T} e^{−rτ} L_I (V̂ − C)^+], CVA = E[1{τ_C first, τ<T} e^{−rτ} L_C (V̂ − C)^−].
// With these definitions V_0 − V̂_0 = CVA − DVA.
inline CvaDva estimate_cva_dva(const PathBundle& b, const MarketParams& params, const ClaimSpec& claim)
{
    const auto& r = params.rates;
    if (!has_linear_rates(r) || std::abs(r.r_f_plus - r.r_D) > 1e-14 || std::abs(r.r_c_plus - r.r_D) > 1e-14) {
        throw PreconditionError("CVA/DVA recovery needs r_D = r_f = r_c");
    }
    const PublicPricer pricer(claim, r.r_D, params.equity.sigma);
    const double alpha = params.alpha;
    std::vector<double> cva(b.n_paths, 0.0), dva(b.n_paths, 0.0);
    for (std::size_t p = 0; p < b.n_paths; ++p) {
        if (b.first[p] == Party::none) continue;
        const double v = pricer.value(b.tau[p], b.S_tau[p]);
        const double exposure = v - collateral(alpha, v);
        const double disc = std::exp(-r.r_D * b.tau[p]);
        if (b.first[p] == Party::investor) dva[p] = disc * params.credit.L_I * positive_part(exposure);
        else cva[p] = disc * params.credit.L_C * negative_part(exposure);
    }
    return {detail::summarize(cva, b.antithetic), detail::summarize(dva, b.antithetic)};
}

} // namespace xva
