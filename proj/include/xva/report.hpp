#pragma once

// Batch front end: runs the engines named by a scenario, cross-checks them
// and renders CSV artifacts. Everything here works on in-memory tables; the
// command-line tool only moves them to disk.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xva/analytic_pricing.hpp"
#include "xva/bsde_engine.hpp"
#include "xva/errors.hpp"
#include "xva/market_model.hpp"
#include "xva/mc_oracle.hpp"
#include "xva/parallel.hpp"
#include "xva/scenario.hpp"
#include "xva/xva_closed_form.hpp"

namespace xva {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest round-trippable text for a double; NaN renders as an empty cell.
inline std::string format_number(double x)
{
    if (std::isnan(x)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row)
    {
        if (row.size() != header.size()) throw Error("row width does not match the table header");
        rows.push_back(std::move(row));
    }
    std::string csv() const
    {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }
};

namespace columns {
inline const std::vector<std::string> xva{"t",       "S",       "engine",         "total",  "funding_leg",
                                          "dva_leg", "cva_leg", "collateral_leg", "factor", "vhat"};
inline const std::vector<std::string> hedge{"t", "S", "xi_stock", "xi_bond_I", "xi_bond_C", "psi_repo", "xi_funding"};
inline const std::vector<std::string> interval{"V0_minus", "V0_plus", "width"};
inline const std::vector<std::string> crosscheck{"a", "b", "metric", "value_a", "value_b", "delta", "se",
                                                 "tolerance", "pass"};
inline const std::vector<std::string> violations{"id", "inequality"};
inline const std::vector<std::string> sweep_tail{"engine", "total",     "funding_leg", "dva_leg",   "cva_leg",
                                                 "collateral_leg", "factor", "vhat", "xi_stock", "xi_bond_I",
                                                 "xi_bond_C", "width", "violations"};
} // namespace columns

// One engine's valuation at one point; legs the engine cannot split are NaN.
struct XvaRow {
    double t = 0.0;
    double S = 0.0;
    std::string engine;
    double total = kNaN;
    double funding_leg = kNaN;
    double dva_leg = kNaN;
    double cva_leg = kNaN;
    double collateral_leg = kNaN;
    double factor = kNaN;
    double vhat = kNaN;
    // Standard errors, MC only.
    double se_total = kNaN, se_funding = kNaN, se_dva = kNaN, se_cva = kNaN, se_collateral = kNaN;

    double value() const { return vhat + total; }
};

struct CrossRow {
    std::string a, b, metric;
    double value_a = 0.0, value_b = 0.0, se = kNaN, tolerance = 0.0;
    double delta() const { return value_a - value_b; }
    bool pass() const { return std::abs(delta()) <= tolerance; }
};

inline XvaRow row_from(const XvaBreakdown& x, double t, double S, const char* engine)
{
    XvaRow r;
    r.t = t;
    r.S = S;
    r.engine = engine;
    r.total = x.total;
    r.funding_leg = x.funding_leg;
    r.dva_leg = x.dva_leg;
    r.cva_leg = x.cva_leg;
    r.collateral_leg = x.collateral_leg;
    r.factor = x.adjustment_factor;
    r.vhat = x.reference_value;
    return r;
}

inline XvaRow row_from(const McXvaBreakdown& x, double S0)
{
    XvaRow r;
    r.S = S0;
    r.engine = "mc";
    r.total = x.total.value;
    r.funding_leg = x.funding_leg.value;
    r.dva_leg = x.dva_leg.value;
    r.cva_leg = x.cva_leg.value;
    r.collateral_leg = x.collateral_leg.value;
    r.vhat = x.reference_value;
    r.factor = r.vhat != 0.0 ? r.value() / r.vhat : kNaN;
    r.se_total = x.total.se;
    r.se_funding = x.funding_leg.se;
    r.se_dva = x.dva_leg.se;
    r.se_cva = x.cva_leg.se;
    r.se_collateral = x.collateral_leg.se;
    return r;
}

inline XvaRow row_from(const GridSolution& sol, const ClaimSpec& claim, double t, double S)
{
    XvaRow r;
    r.t = t;
    r.S = S;
    r.engine = "pde";
    r.vhat = public_value(claim, sol.r_D, sol.sigma, t, S);
    const double v = sol.value_at(t, S);
    r.total = v - r.vhat;
    r.factor = r.vhat != 0.0 ? v / r.vhat : kNaN;
    return r;
}

inline Table xva_table(const std::vector<XvaRow>& rows)
{
    Table t{columns::xva, {}};
    for (const auto& r : rows) {
        t.add({format_number(r.t), format_number(r.S), r.engine, format_number(r.total), format_number(r.funding_leg),
               format_number(r.dva_leg), format_number(r.cva_leg), format_number(r.collateral_leg),
               format_number(r.factor), format_number(r.vhat)});
    }
    return t;
}

inline Table hedge_table(const std::vector<HedgeReport>& rows)
{
    Table t{columns::hedge, {}};
    for (const auto& h : rows) {
        t.add({format_number(h.t), format_number(h.S), format_number(h.xi_stock), format_number(h.xi_bond_I),
               format_number(h.xi_bond_C), format_number(h.psi_repo), format_number(h.xi_funding)});
    }
    return t;
}

inline Table interval_table(const IntervalReport& r)
{
    Table t{columns::interval, {}};
    t.add({format_number(r.V0_minus), format_number(r.V0_plus), format_number(r.width)});
    return t;
}

inline Table crosscheck_table(const std::vector<CrossRow>& rows)
{
    Table t{columns::crosscheck, {}};
    for (const auto& r : rows) {
        t.add({r.a, r.b, r.metric, format_number(r.value_a), format_number(r.value_b), format_number(r.delta()),
               format_number(r.se), format_number(r.tolerance), r.pass() ? "pass" : "fail"});
    }
    return t;
}

inline Table violations_table(const ValidationReport& v)
{
    Table t{columns::violations, {}};
    for (const auto& x : v.violations) t.add({x.id, x.inequality});
    return t;
}

inline bool closed_form_available(const MarketParams& p) { return has_linear_rates(p.rates); }

inline bool sign_definite(const ClaimSpec& claim)
{
    const LinearPayoff f = canonical_payoff(claim);
    return f.nonnegative() || f.nonpositive();
}

struct EngineResults {
    std::vector<XvaRow> rows;
    std::optional<GridSolution> pde;
};

// Valuations requested by the run mode. The closed form and the MC oracle are
// skipped in crosscheck mode when the rates are not linear; asking for them
// explicitly in that case is an error.
inline EngineResults run_engines(const ScenarioConfig& cfg, RunMode mode)
{
    const MarketParams m = cfg.resolved_market();
    const bool want_cf = mode == RunMode::closed_form || (mode == RunMode::crosscheck && closed_form_available(m));
    const bool want_mc = mode == RunMode::mc || (mode == RunMode::crosscheck && closed_form_available(m));
    const bool want_pde = mode == RunMode::pde || mode == RunMode::crosscheck;
    EngineResults out;
    if (want_cf) {
        for (const auto& p : cfg.eval_points()) out.rows.push_back(row_from(default_xva(m, cfg.claim, p.t, p.S), p.t, p.S, "closed_form"));
    }
    if (want_pde) {
        out.pde = solve(cfg.claim, m, SolverSide::seller, cfg.grid);
        for (const auto& p : cfg.eval_points()) out.rows.push_back(row_from(*out.pde, cfg.claim, p.t, p.S));
    }
    if (want_mc) {
        const PathBundle b = simulate(m, cfg.claim, cfg.mc.n_paths, cfg.mc.n_steps, cfg.mc.seed, cfg.mc.options);
        out.rows.push_back(row_from(estimate_representation(b, m, cfg.claim), m.equity.S0));
    }
    return out;
}

// Pairwise comparisons at (0, S0) in the fixed engine order closed_form,
// pde, mc; deltas are first minus second.
inline std::vector<CrossRow> crosscheck_rows(const ScenarioConfig& cfg, const std::vector<XvaRow>& rows)
{
    const double S0 = cfg.market.equity.S0;
    auto find = [&](const char* engine) -> const XvaRow* {
        for (const auto& r : rows) {
            if (r.engine == engine && r.t == 0.0 && r.S == S0) return &r;
        }
        return nullptr;
    };
    const XvaRow* cf = find("closed_form");
    const XvaRow* pde = find("pde");
    const XvaRow* mc = find("mc");
    std::vector<CrossRow> out;
    if (cf && pde) {
        CrossRow r{"closed_form", "pde", "value", cf->value(), pde->value()};
        r.tolerance = cfg.run.pde_tolerance * std::max(std::abs(cf->value()), 1e-12);
        out.push_back(r);
    }
    const double k = cfg.run.mc_sigmas;
    if (cf && mc) {
        auto leg = [&](const char* name, double a, double b, double se) {
            CrossRow r{"closed_form", "mc", name, a, b, se};
            r.tolerance = k * se;
            out.push_back(r);
        };
        leg("funding_leg", cf->funding_leg, mc->funding_leg, mc->se_funding);
        leg("dva_leg", cf->dva_leg, mc->dva_leg, mc->se_dva);
        leg("cva_leg", cf->cva_leg, mc->cva_leg, mc->se_cva);
        leg("collateral_leg", cf->collateral_leg, mc->collateral_leg, mc->se_collateral);
        leg("total", cf->total, mc->total, mc->se_total);
    }
    if (pde && mc) {
        CrossRow r{"pde", "mc", "value", pde->value(), mc->value(), mc->se_total};
        // Both sides carry error here: sampling noise and the lattice's own.
        r.tolerance = k * mc->se_total + cfg.run.pde_tolerance * std::abs(pde->value());
        out.push_back(r);
    }
    return out;
}

// Hedge positions at each point: the closed form when it applies, otherwise
// read off the lattice (solved here if `pde` is empty).
inline std::vector<HedgeReport> hedge_rows(const ScenarioConfig& cfg, RunMode mode, const GridSolution* pde = nullptr)
{
    const MarketParams m = cfg.resolved_market();
    const bool use_cf = mode != RunMode::pde && closed_form_available(m) &&
                        (!m.credit.defaults_enabled || sign_definite(cfg.claim));
    std::optional<GridSolution> own;
    if (!use_cf && !pde) {
        own = solve(cfg.claim, m, SolverSide::seller, cfg.grid);
        pde = &*own;
    }
    std::vector<HedgeReport> out;
    for (const auto& p : cfg.eval_points()) {
        out.push_back(use_cf ? default_hedge(m, cfg.claim, p.t, p.S) : extract_hedge(*pde, m, cfg.claim, p.t, p.S));
    }
    return out;
}

struct SweepRow {
    std::vector<double> coords;
    XvaRow xva;
    HedgeReport hedge;
    double width = kNaN;
    std::vector<std::string> violations;
};

struct SweepResult {
    std::vector<std::string> axes;
    std::vector<SweepRow> rows;

    Table table() const
    {
        Table t;
        t.header = axes;
        t.header.insert(t.header.end(), columns::sweep_tail.begin(), columns::sweep_tail.end());
        for (const auto& r : rows) {
            std::vector<std::string> cells;
            for (double c : r.coords) cells.push_back(format_number(c));
            std::string ids;
            for (const auto& v : r.violations) ids += (ids.empty() ? "" : ";") + v;
            const auto& x = r.xva;
            for (std::string s : {x.engine, format_number(x.total), format_number(x.funding_leg),
                                  format_number(x.dva_leg), format_number(x.cva_leg), format_number(x.collateral_leg),
                                  format_number(x.factor), format_number(x.vhat), format_number(r.hedge.xi_stock),
                                  format_number(r.hedge.xi_bond_I), format_number(r.hedge.xi_bond_C),
                                  format_number(r.width), ids}) {
                cells.push_back(std::move(s));
            }
            t.add(std::move(cells));
        }
        return t;
    }
};

inline constexpr std::size_t max_sweep_points = 10000;

// Cartesian product of the axes, first axis outermost. Each point is valued
// at (0, S0) by the closed form when the rates allow it and by the lattice
// otherwise; the interval width always comes from the lattice.
inline SweepResult sweep(const ScenarioConfig& cfg, const std::vector<SweepAxis>& axes, bool with_interval = true)
{
    if (axes.empty()) throw InvalidInput("sweep needs at least one axis");
    std::size_t n = 1;
    for (const auto& a : axes) {
        if (a.values.empty()) throw InvalidInput("sweep axis '" + a.name + "' is empty");
        for (double v : a.values) {
            if (!std::isfinite(v)) throw InvalidInput("sweep axis '" + a.name + "' has a non-finite value");
        }
        if (n > max_sweep_points / a.values.size()) throw InvalidInput("sweep exceeds 10^4 points");
        n *= a.values.size();
    }
    SweepResult res;
    for (const auto& a : axes) res.axes.push_back(a.name);
    res.rows.resize(n);
    std::vector<ScenarioConfig> points(n, cfg);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i;
        res.rows[i].coords.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            const double v = axes[a].values[rest % axes[a].values.size()];
            rest /= axes[a].values.size();
            res.rows[i].coords[a] = v;
            apply_axis(points[i], axes[a].name, v);
        }
        check_structure(points[i].resolved_market());
        points[i].run.points = {{0.0, points[i].market.equity.S0}};
    }
    parallel_for(n, [&](std::size_t i) {
        const ScenarioConfig& pc = points[i];
        const MarketParams m = pc.resolved_market();
        SweepRow& row = res.rows[i];
        for (const auto& v : validate(m).violations) row.violations.push_back(v.id);
        const double S0 = m.equity.S0;
        std::optional<GridSolution> sol;
        if (cfg.run.mode != RunMode::pde && closed_form_available(m)) {
            row.xva = row_from(default_xva(m, pc.claim, 0.0, S0), 0.0, S0, "closed_form");
        } else {
            sol = solve(pc.claim, m, SolverSide::seller, pc.grid);
            row.xva = row_from(*sol, pc.claim, 0.0, S0);
        }
        const RunMode hedge_mode = sol ? RunMode::pde : cfg.run.mode;
        row.hedge = hedge_rows(pc, hedge_mode, sol ? &*sol : nullptr).front();
        if (with_interval) row.width = interval(pc.claim, m, pc.grid).width;
    });
    return res;
}

enum class Command { validate, price, interval, hedge, sweep, crosscheck };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 2;
inline constexpr int numerical = 3;
inline constexpr int crosscheck = 4;
} // namespace exit_code

struct RunOutcome {
    int exit_code = exit_code::ok;
    std::map<std::string, std::string> artifacts; // file name → contents
    std::vector<std::string> messages;
};

inline std::string describe(const ValidationReport& v)
{
    std::string s;
    for (const auto& x : v.violations) s += "  " + x.id + ": " + x.inequality + "\n";
    return s;
}

// Executes one command on a parsed scenario. Errors never escape; they map
// onto exit codes and leave the artifact set empty.
inline RunOutcome run_command(Command cmd, const ScenarioConfig& cfg_in, bool force = false,
                              const std::vector<SweepAxis>& extra_axes = {})
{
    RunOutcome out;
    ScenarioConfig cfg = cfg_in;
    cfg.run.force = cfg.run.force || force;
    try {
        const MarketParams m = cfg.resolved_market();
        check_structure(m);
        const ValidationReport report = validate(m);
        if (!report.passed()) {
            out.messages.push_back("rate inequalities violated:\n" + describe(report));
            if (cmd == Command::validate || !cfg.run.force) {
                out.exit_code = exit_code::validation;
                return out;
            }
            out.messages.push_back("continuing because --force is set");
        }
        if (cmd == Command::validate) {
            out.messages.push_back("scenario is valid");
            return out;
        }
        out.artifacts["violations.csv"] = violations_table(report).csv();
        switch (cmd) {
        case Command::price: {
            const EngineResults e = run_engines(cfg, cfg.run.mode);
            out.artifacts["xva.csv"] = xva_table(e.rows).csv();
            break;
        }
        case Command::interval:
            out.artifacts["interval.csv"] = interval_table(interval(cfg.claim, m, cfg.grid)).csv();
            break;
        case Command::hedge:
            out.artifacts["hedge.csv"] = hedge_table(hedge_rows(cfg, cfg.run.mode)).csv();
            break;
        case Command::sweep: {
            std::vector<SweepAxis> axes = cfg.run.sweep;
            for (const auto& a : extra_axes) {
                bool replaced = false;
                for (auto& b : axes) {
                    if (b.name == a.name) {
                        b = a;
                        replaced = true;
                    }
                }
                if (!replaced) axes.push_back(a);
            }
            out.artifacts["sweep.csv"] = sweep(cfg, axes).table().csv();
            break;
        }
        case Command::crosscheck: {
            const EngineResults e = run_engines(cfg, RunMode::crosscheck);
            const auto checks = crosscheck_rows(cfg, e.rows);
            out.artifacts["xva.csv"] = xva_table(e.rows).csv();
            out.artifacts["crosscheck.csv"] = crosscheck_table(checks).csv();
            for (const auto& c : checks) {
                if (!c.pass()) {
                    out.exit_code = exit_code::crosscheck;
                    out.messages.push_back("crosscheck breach: " + c.a + " vs " + c.b + " on " + c.metric +
                                           ", delta " + format_number(c.delta()) + " > " +
                                           format_number(c.tolerance));
                }
            }
            break;
        }
        case Command::validate: break;
        }
        return out;
    } catch (const InvalidInput& e) {
        out.exit_code = exit_code::validation;
        out.messages.push_back(std::string("invalid input: ") + e.what());
    } catch (const std::exception& e) {
        out.exit_code = exit_code::numerical;
        out.messages.push_back(std::string("numerical failure: ") + e.what());
    }
    out.artifacts.clear();
    return out;
}

// Writes every artifact into `dir`. If any write fails the files already
// written are removed and the error is rethrown.
inline void write_artifacts(const std::filesystem::path& dir, const std::map<std::string, std::string>& artifacts)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    try {
        for (const auto& [name, text] : artifacts) {
            const auto path = dir / name;
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f) throw Error("cannot open " + path.string() + " for writing");
            written.push_back(path);
            f << text;
            f.close();
            if (!f) throw Error("failed writing " + path.string());
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
        throw;
    }
}

// Markdown reference for scenario files.
inline std::string schema_markdown()
{
    return R"(# Scenario file reference

Scenario files are JSON objects. Every block is optional and falls back to the
defaults listed here. Unknown keys are rejected at any level.

## Units

* Rates and intensities are continuously compounded decimals per year:
  five percent is `0.05`, never `5`. Any rate with absolute value above 1 is
  rejected as a likely percentage.
* Times and maturities are in years.
* Loss rates `L_I`, `L_C` and the collateral level `alpha` are fractions in [0, 1].
* Prices are in the currency unit of `equity.S0`.

## `rates`

| key | default | meaning |
|---|---|---|
| `r_f_plus` | 0.05 | funding rate earned on a positive treasury balance |
| `r_f_minus` | 0.05 | funding rate paid on a negative treasury balance |
| `r_r_plus` | 0.05 | repo rate earned when lending cash against stock |
| `r_r_minus` | 0.05 | repo rate paid when borrowing cash against stock |
| `r_c_plus` | 0.05 | collateral rate when the investor posts |
| `r_c_minus` | 0.05 | collateral rate when the investor receives |
| `r_D` | 0.05 | closeout discount rate used by the valuation agent |

The closed form and the Monte Carlo oracle need `r_f_plus = r_f_minus`,
`r_c_plus = r_c_minus` and `r_D = r_r_plus = r_r_minus`. Other rate sets go
to the backward solver.

## `credit`

| key | default | meaning |
|---|---|---|
| `h_I_P`, `h_C_P` | 0 | physical default intensities of investor and counterparty |
| `r_I`, `r_C` | 0 | bond rates of return |
| `L_I`, `L_C` | 0 | loss rates at default |
| `h_I_Q`, `h_C_Q` | absent | valuation intensities; when given they take precedence and any missing physical intensity is backed out |
| `enabled` | true | false switches defaults off entirely |

Valuation intensities are `h_Q = r - r_D + h_P` and must be positive when
defaults are enabled, so a scenario with defaults needs either intensities
or `"enabled": false`.

## `equity`

| key | default | meaning |
|---|---|---|
| `S0` | 100 | spot price, positive |
| `mu` | 0.05 | physical drift, used by hedge backtests only |
| `sigma` | 0.2 | volatility, positive |

## `collateral`

| key | default | meaning |
|---|---|---|
| `alpha` | 0 | fraction of the public value held as collateral |

## `claim`

| key | default | meaning |
|---|---|---|
| `kind` | `call` | `call`, `put` or `custom` |
| `strike` | 100 | strike for calls and puts |
| `maturity` | 1 | years to maturity, positive |
| `side` | `long` | `long` or `short`; short negates the payoff |
| `notional` | 1 | positive multiplier |
| `knots` | none | custom payoff as `[[x, y], ...]` with increasing `x`, extrapolated linearly |

## `grid`

| key | default | meaning |
|---|---|---|
| `n_time` | 200 | time steps |
| `n_space` | 400 | log-price intervals, rounded up to even |
| `width_sigmas` | 6 | half-width of the log-price domain in units of sigma times root maturity |
| `picard_tol` | 1e-10 | fixed-point tolerance per step |
| `picard_max` | 50 | fixed-point iteration cap per step |
| `scheme` | `rannacher` | `rannacher` or `implicit_euler` |
| `smooth_terminal` | true | cell-average the payoff at maturity |

## `mc`

| key | default | meaning |
|---|---|---|
| `n_paths` | 100000 | simulated paths |
| `n_steps` | 250 | time steps per path |
| `seed` | 1 | seed; results are identical for any thread count |
| `antithetic` | false | pair each path with its mirror |
| `resource_cap` | 1e8 | largest allowed paths times (steps + 1) |
| `tie_break` | `counterparty` | first defaulter if both default at once |

## `run`

| key | default | meaning |
|---|---|---|
| `mode` | `crosscheck` | `closed_form`, `pde`, `mc` or `crosscheck` |
| `force` | false | run even when rate inequalities are violated |
| `points` | `[{"t": 0, "S": S0}]` | evaluation points for `price` and `hedge` |
| `sweep` | none | axes as `{"axis": name, "from": a, "to": b, "step": d}` or `{"axis": name, "values": [...]}` |
| `pde_tolerance` | 5e-3 | relative tolerance for closed form against the lattice |
| `mc_sigmas` | 3 | standard errors allowed in comparisons with Monte Carlo (the lattice comparison also adds `pde_tolerance`) |

Sweep axis names: `r_f`, `r_r`, `r_c` (both sides of the pair), `r_f_plus`,
`r_f_minus`, `r_r_plus`, `r_r_minus`, `r_c_plus`, `r_c_minus`, `r_D`, `alpha`,
`h_I_Q`, `h_C_Q`, `h_I_P`, `h_C_P`, `L_I`, `L_C`, `sigma`, `S0`, `strike`,
`maturity`. On the command line the same axes are written
`name=a:b:step` (inclusive) or `name=v1,v2,...`.

## Outputs

| file | columns |
|---|---|
| `xva.csv` | t, S, engine, total, funding_leg, dva_leg, cva_leg, collateral_leg, factor, vhat |
| `hedge.csv` | t, S, xi_stock, xi_bond_I, xi_bond_C, psi_repo, xi_funding |
| `interval.csv` | V0_minus, V0_plus, width |
| `crosscheck.csv` | a, b, metric, value_a, value_b, delta, se, tolerance, pass |
| `sweep.csv` | axis columns, then engine, total, legs, factor, vhat, xi_stock, xi_bond_I, xi_bond_C, width, violations |
| `violations.csv` | id, inequality |

`total` is the replication value minus the public value. Empty cells mark
quantities an engine does not produce. The Monte Carlo `total` uses the
discounted payoff as a control variate, so it can differ from the sum of its
legs minus `vhat` by sampling noise. Exit codes: 0 success, 2 invalid
input or violated inequalities, 3 numerical failure, 4 crosscheck breach.
)";
}

} // namespace xva
