#pragma once

// Scenario files: strict JSON in, strict JSON out.
//
// Unknown keys anywhere are rejected. Rates are continuously compounded
// decimals per year (0.05 means five percent); values outside [-1, 1] are
// rejected as a likely percentage mix-up.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "xva/analytic_pricing.hpp"
#include "xva/bsde_engine.hpp"
#include "xva/errors.hpp"
#include "xva/market_model.hpp"
#include "xva/mc_oracle.hpp"

namespace xva {

enum class RunMode { closed_form, pde, mc, crosscheck };

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct EvalPoint {
    double t = 0.0;
    double S = 0.0;
};

struct McSettings {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 250;
    std::uint64_t seed = 1;
    McOptions options;
};

struct RunSettings {
    RunMode mode = RunMode::crosscheck;
    bool force = false;
    std::vector<EvalPoint> points; // empty: (0, S0)
    std::vector<SweepAxis> sweep;
    double pde_tolerance = 5e-3; // relative, closed form vs lattice
    double mc_sigmas = 3.0;      // standard errors allowed for MC comparisons
};

struct ScenarioConfig {
    MarketParams market;
    bool h_I_P_given = true;
    bool h_C_P_given = true;
    ClaimSpec claim;
    GridOptions grid;
    McSettings mc;
    RunSettings run;

    // Market data with directly supplied Q-intensities made consistent.
    MarketParams resolved_market() const
    {
        MarketParams p = market;
        resolve_intensity_overrides(p, h_I_P_given, h_C_P_given);
        return p;
    }
    std::vector<EvalPoint> eval_points() const
    {
        if (run.points.empty()) return {{0.0, market.equity.S0}};
        return run.points;
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) throw InvalidInput(where + " must be a JSON object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!ok.count(it.key())) throw InvalidInput("unknown key '" + it.key() + "' in " + where);
    }
}

inline double get_number(const json& obj, const std::string& where, const char* key)
{
    const json& v = obj.at(key);
    if (!v.is_number()) throw InvalidInput(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidInput(where + "." + key + " must be finite");
    return x;
}

inline void read_number(const json& obj, const std::string& where, const char* key, double& out)
{
    if (obj.contains(key)) out = get_number(obj, where, key);
}

inline void read_rate(const json& obj, const std::string& where, const char* key, double& out)
{
    if (!obj.contains(key)) return;
    const double x = get_number(obj, where, key);
    if (std::abs(x) > 1.0) {
        throw InvalidInput(where + "." + key + " = " + std::to_string(x) +
                           " is not a decimal rate; write 5% as 0.05");
    }
    out = x;
}

inline void read_bool(const json& obj, const std::string& where, const char* key, bool& out)
{
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) throw InvalidInput(where + "." + key + " must be true or false");
    out = obj.at(key).get<bool>();
}

template <class Int>
void read_count(const json& obj, const std::string& where, const char* key, Int& out)
{
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw InvalidInput(where + "." + key + " must be an integer");
    if (v.is_number_integer() && v.get<long long>() < 0) throw InvalidInput(where + "." + key + " must be non-negative");
    out = static_cast<Int>(v.get<unsigned long long>());
}

inline std::string read_string(const json& obj, const std::string& where, const char* key)
{
    if (!obj.at(key).is_string()) throw InvalidInput(where + "." + key + " must be a string");
    return obj.at(key).get<std::string>();
}

inline RunMode parse_mode(const std::string& s)
{
    if (s == "closed_form") return RunMode::closed_form;
    if (s == "pde") return RunMode::pde;
    if (s == "mc") return RunMode::mc;
    if (s == "crosscheck") return RunMode::crosscheck;
    throw InvalidInput("run.mode must be closed_form, pde, mc or crosscheck");
}

inline const char* mode_name(RunMode m)
{
    switch (m) {
    case RunMode::closed_form: return "closed_form";
    case RunMode::pde: return "pde";
    case RunMode::mc: return "mc";
    case RunMode::crosscheck: return "crosscheck";
    }
    return "?";
}

inline SweepAxis parse_axis_json(const json& a)
{
    reject_unknown(a, "run.sweep[]", {"axis", "from", "to", "step", "values"});
    SweepAxis axis;
    axis.name = read_string(a, "run.sweep[]", "axis");
    if (a.contains("values")) {
        if (a.contains("from") || a.contains("to") || a.contains("step")) {
            throw InvalidInput("sweep axis '" + axis.name + "' mixes values with from/to/step");
        }
        if (!a.at("values").is_array()) throw InvalidInput("run.sweep[].values must be an array");
        for (const auto& v : a.at("values")) {
            if (!v.is_number()) throw InvalidInput("sweep values must be numbers");
            axis.values.push_back(v.get<double>());
        }
    } else {
        const double from = get_number(a, "run.sweep[]", "from");
        const double to = get_number(a, "run.sweep[]", "to");
        const double step = get_number(a, "run.sweep[]", "step");
        if (!(step > 0.0) || to < from) throw InvalidInput("sweep range needs step > 0 and to >= from");
        const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
        if (n > 10000) throw InvalidInput("sweep axis has more than 10^4 points");
        for (std::size_t i = 0; i < n; ++i) axis.values.push_back(from + step * static_cast<double>(i));
    }
    if (axis.values.empty()) throw InvalidInput("sweep axis '" + axis.name + "' has no values");
    return axis;
}

} // namespace detail

// `name=a:b:step` (inclusive range) or `name=v1,v2,...`.
inline SweepAxis parse_axis_spec(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidInput("axis spec must look like name=a:b:step or name=v1,v2");
    SweepAxis axis;
    axis.name = spec.substr(0, eq);
    const std::string body = spec.substr(eq + 1);
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            throw InvalidInput("bad number '" + s + "' in axis spec " + spec);
        }
        if (used != s.size() || !std::isfinite(x)) throw InvalidInput("bad number '" + s + "' in axis spec " + spec);
        return x;
    };
    if (body.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(body);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3) throw InvalidInput("range axis needs a:b:step in " + spec);
        const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
        if (!(step > 0.0) || b < a) throw InvalidInput("range axis needs step > 0 and b >= a in " + spec);
        const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
        if (n > 10000) throw InvalidInput("sweep axis has more than 10^4 points");
        for (std::size_t i = 0; i < n; ++i) axis.values.push_back(a + step * static_cast<double>(i));
    } else {
        std::stringstream ss(body);
        for (std::string part; std::getline(ss, part, ',');) axis.values.push_back(number(part));
    }
    if (axis.values.empty()) throw InvalidInput("axis spec has no values: " + spec);
    return axis;
}

inline ScenarioConfig parse_scenario(const nlohmann::json& j)
{
    using detail::read_number;
    using detail::read_rate;
    detail::reject_unknown(j, "scenario", {"rates", "credit", "equity", "collateral", "claim", "grid", "mc", "run"});
    ScenarioConfig cfg;
    auto& m = cfg.market;

    if (j.contains("rates")) {
        const auto& r = j.at("rates");
        detail::reject_unknown(r, "rates",
                               {"r_f_plus", "r_f_minus", "r_r_plus", "r_r_minus", "r_c_plus", "r_c_minus", "r_D"});
        read_rate(r, "rates", "r_f_plus", m.rates.r_f_plus);
        read_rate(r, "rates", "r_f_minus", m.rates.r_f_minus);
        read_rate(r, "rates", "r_r_plus", m.rates.r_r_plus);
        read_rate(r, "rates", "r_r_minus", m.rates.r_r_minus);
        read_rate(r, "rates", "r_c_plus", m.rates.r_c_plus);
        read_rate(r, "rates", "r_c_minus", m.rates.r_c_minus);
        read_rate(r, "rates", "r_D", m.rates.r_D);
    }
    if (j.contains("credit")) {
        const auto& c = j.at("credit");
        detail::reject_unknown(c, "credit", {"h_I_P", "h_C_P", "r_I", "r_C", "L_I", "L_C", "h_I_Q", "h_C_Q", "enabled"});
        cfg.h_I_P_given = c.contains("h_I_P");
        cfg.h_C_P_given = c.contains("h_C_P");
        read_rate(c, "credit", "h_I_P", m.credit.h_I_P);
        read_rate(c, "credit", "h_C_P", m.credit.h_C_P);
        read_rate(c, "credit", "r_I", m.credit.r_I);
        read_rate(c, "credit", "r_C", m.credit.r_C);
        read_number(c, "credit", "L_I", m.credit.L_I);
        read_number(c, "credit", "L_C", m.credit.L_C);
        if (c.contains("h_I_Q")) {
            double x = 0.0;
            read_rate(c, "credit", "h_I_Q", x);
            m.credit.h_I_Q = x;
        }
        if (c.contains("h_C_Q")) {
            double x = 0.0;
            read_rate(c, "credit", "h_C_Q", x);
            m.credit.h_C_Q = x;
        }
        detail::read_bool(c, "credit", "enabled", m.credit.defaults_enabled);
    }
    if (j.contains("equity")) {
        const auto& e = j.at("equity");
        detail::reject_unknown(e, "equity", {"S0", "mu", "sigma"});
        read_number(e, "equity", "S0", m.equity.S0);
        read_rate(e, "equity", "mu", m.equity.mu);
        read_number(e, "equity", "sigma", m.equity.sigma);
    }
    if (j.contains("collateral")) {
        const auto& c = j.at("collateral");
        detail::reject_unknown(c, "collateral", {"alpha"});
        read_number(c, "collateral", "alpha", m.alpha);
    }
    if (j.contains("claim")) {
        const auto& c = j.at("claim");
        detail::reject_unknown(c, "claim", {"kind", "strike", "maturity", "side", "notional", "knots"});
        auto& cl = cfg.claim;
        if (c.contains("kind")) {
            const std::string k = detail::read_string(c, "claim", "kind");
            if (k == "call") cl.kind = ClaimKind::call;
            else if (k == "put") cl.kind = ClaimKind::put;
            else if (k == "custom") cl.kind = ClaimKind::custom;
            else throw InvalidInput("claim.kind must be call, put or custom");
        }
        read_number(c, "claim", "strike", cl.strike);
        read_number(c, "claim", "maturity", cl.maturity);
        read_number(c, "claim", "notional", cl.notional);
        if (c.contains("side")) {
            const std::string s = detail::read_string(c, "claim", "side");
            if (s == "long") cl.side = Side::long_;
            else if (s == "short") cl.side = Side::short_;
            else throw InvalidInput("claim.side must be long or short");
        }
        if (c.contains("knots")) {
            if (!c.at("knots").is_array()) throw InvalidInput("claim.knots must be an array of [x, y] pairs");
            for (const auto& k : c.at("knots")) {
                if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
                    throw InvalidInput("claim.knots entries must be [x, y] number pairs");
                }
                cl.knots.push_back({k[0].get<double>(), k[1].get<double>()});
            }
        }
        if (cl.kind == ClaimKind::custom && cl.knots.empty()) throw InvalidInput("custom claim needs knots");
        if (cl.kind != ClaimKind::custom && !cl.knots.empty()) throw InvalidInput("knots are only valid for custom claims");
        canonical_payoff(cl);
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        detail::reject_unknown(g, "grid", {"n_time", "n_space", "width_sigmas", "picard_tol", "picard_max", "scheme",
                                           "smooth_terminal"});
        detail::read_count(g, "grid", "n_time", cfg.grid.n_time);
        detail::read_count(g, "grid", "n_space", cfg.grid.n_space);
        read_number(g, "grid", "width_sigmas", cfg.grid.width_sigmas);
        read_number(g, "grid", "picard_tol", cfg.grid.picard_tol);
        detail::read_count(g, "grid", "picard_max", cfg.grid.picard_max);
        if (g.contains("scheme")) {
            const std::string s = detail::read_string(g, "grid", "scheme");
            if (s == "implicit_euler") cfg.grid.scheme = TimeScheme::implicit_euler;
            else if (s == "rannacher") cfg.grid.scheme = TimeScheme::rannacher;
            else throw InvalidInput("grid.scheme must be implicit_euler or rannacher");
        }
        detail::read_bool(g, "grid", "smooth_terminal", cfg.grid.smooth_terminal);
    }
    if (j.contains("mc")) {
        const auto& c = j.at("mc");
        detail::reject_unknown(c, "mc", {"n_paths", "n_steps", "seed", "antithetic", "resource_cap", "tie_break"});
        detail::read_count(c, "mc", "n_paths", cfg.mc.n_paths);
        detail::read_count(c, "mc", "n_steps", cfg.mc.n_steps);
        detail::read_count(c, "mc", "seed", cfg.mc.seed);
        detail::read_bool(c, "mc", "antithetic", cfg.mc.options.antithetic);
        read_number(c, "mc", "resource_cap", cfg.mc.options.max_cells);
        if (c.contains("tie_break")) {
            const std::string s = detail::read_string(c, "mc", "tie_break");
            if (s == "counterparty") cfg.mc.options.tie_break = Party::counterparty;
            else if (s == "investor") cfg.mc.options.tie_break = Party::investor;
            else throw InvalidInput("mc.tie_break must be counterparty or investor");
        }
    }
    if (j.contains("run")) {
        const auto& r = j.at("run");
        detail::reject_unknown(r, "run", {"mode", "force", "points", "sweep", "pde_tolerance", "mc_sigmas"});
        if (r.contains("mode")) cfg.run.mode = detail::parse_mode(detail::read_string(r, "run", "mode"));
        detail::read_bool(r, "run", "force", cfg.run.force);
        read_number(r, "run", "pde_tolerance", cfg.run.pde_tolerance);
        read_number(r, "run", "mc_sigmas", cfg.run.mc_sigmas);
        if (r.contains("points")) {
            if (!r.at("points").is_array()) throw InvalidInput("run.points must be an array");
            for (const auto& p : r.at("points")) {
                detail::reject_unknown(p, "run.points[]", {"t", "S"});
                cfg.run.points.push_back({detail::get_number(p, "run.points[]", "t"), detail::get_number(p, "run.points[]", "S")});
            }
        }
        if (r.contains("sweep")) {
            if (!r.at("sweep").is_array()) throw InvalidInput("run.sweep must be an array");
            for (const auto& a : r.at("sweep")) cfg.run.sweep.push_back(detail::parse_axis_json(a));
        }
    }
    check_structure(cfg.resolved_market());
    return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("scenario is not valid JSON: ") + e.what());
    }
    return parse_scenario(j);
}

inline nlohmann::json to_json(const ScenarioConfig& cfg)
{
    using nlohmann::json;
    const auto& m = cfg.market;
    json j;
    j["rates"] = {{"r_f_plus", m.rates.r_f_plus}, {"r_f_minus", m.rates.r_f_minus}, {"r_r_plus", m.rates.r_r_plus},
                  {"r_r_minus", m.rates.r_r_minus}, {"r_c_plus", m.rates.r_c_plus}, {"r_c_minus", m.rates.r_c_minus},
                  {"r_D", m.rates.r_D}};
    json credit = {{"r_I", m.credit.r_I}, {"r_C", m.credit.r_C},         {"L_I", m.credit.L_I},
                   {"L_C", m.credit.L_C}, {"enabled", m.credit.defaults_enabled}};
    if (cfg.h_I_P_given) credit["h_I_P"] = m.credit.h_I_P;
    if (cfg.h_C_P_given) credit["h_C_P"] = m.credit.h_C_P;
    if (m.credit.h_I_Q) credit["h_I_Q"] = *m.credit.h_I_Q;
    if (m.credit.h_C_Q) credit["h_C_Q"] = *m.credit.h_C_Q;
    j["credit"] = credit;
    j["equity"] = {{"S0", m.equity.S0}, {"mu", m.equity.mu}, {"sigma", m.equity.sigma}};
    j["collateral"] = {{"alpha", m.alpha}};
    const auto& c = cfg.claim;
    json claim = {{"kind", c.kind == ClaimKind::call ? "call" : c.kind == ClaimKind::put ? "put" : "custom"},
                  {"strike", c.strike},
                  {"maturity", c.maturity},
                  {"side", c.side == Side::long_ ? "long" : "short"},
                  {"notional", c.notional}};
    if (c.kind == ClaimKind::custom) {
        json knots = json::array();
        for (const auto& k : c.knots) knots.push_back({k.x, k.y});
        claim["knots"] = knots;
    }
    j["claim"] = claim;
    j["grid"] = {{"n_time", cfg.grid.n_time},
                 {"n_space", cfg.grid.n_space},
                 {"width_sigmas", cfg.grid.width_sigmas},
                 {"picard_tol", cfg.grid.picard_tol},
                 {"picard_max", cfg.grid.picard_max},
                 {"scheme", cfg.grid.scheme == TimeScheme::rannacher ? "rannacher" : "implicit_euler"},
                 {"smooth_terminal", cfg.grid.smooth_terminal}};
    j["mc"] = {{"n_paths", cfg.mc.n_paths},
               {"n_steps", cfg.mc.n_steps},
               {"seed", cfg.mc.seed},
               {"antithetic", cfg.mc.options.antithetic},
               {"resource_cap", cfg.mc.options.max_cells},
               {"tie_break", cfg.mc.options.tie_break == Party::investor ? "investor" : "counterparty"}};
    json run = {{"mode", detail::mode_name(cfg.run.mode)},
                {"force", cfg.run.force},
                {"pde_tolerance", cfg.run.pde_tolerance},
                {"mc_sigmas", cfg.run.mc_sigmas}};
    if (!cfg.run.points.empty()) {
        json pts = json::array();
        for (const auto& p : cfg.run.points) pts.push_back({{"t", p.t}, {"S", p.S}});
        run["points"] = pts;
    }
    if (!cfg.run.sweep.empty()) {
        json axes = json::array();
        for (const auto& a : cfg.run.sweep) axes.push_back({{"axis", a.name}, {"values", a.values}});
        run["sweep"] = axes;
    }
    j["run"] = run;
    return j;
}

// Applies one sweep coordinate. Short names r_f, r_r and r_c set both sides
// of the pair.
inline void apply_axis(ScenarioConfig& cfg, const std::string& name, double value)
{
    auto& m = cfg.market;
    auto& r = m.rates;
    if (name == "r_f") r.r_f_plus = r.r_f_minus = value;
    else if (name == "r_r") r.r_r_plus = r.r_r_minus = value;
    else if (name == "r_c") r.r_c_plus = r.r_c_minus = value;
    else if (name == "r_f_plus") r.r_f_plus = value;
    else if (name == "r_f_minus") r.r_f_minus = value;
    else if (name == "r_r_plus") r.r_r_plus = value;
    else if (name == "r_r_minus") r.r_r_minus = value;
    else if (name == "r_c_plus") r.r_c_plus = value;
    else if (name == "r_c_minus") r.r_c_minus = value;
    else if (name == "r_D") r.r_D = value;
    else if (name == "alpha") m.alpha = value;
    else if (name == "h_I_Q") m.credit.h_I_Q = value;
    else if (name == "h_C_Q") m.credit.h_C_Q = value;
    else if (name == "h_I_P") { m.credit.h_I_P = value; cfg.h_I_P_given = true; }
    else if (name == "h_C_P") { m.credit.h_C_P = value; cfg.h_C_P_given = true; }
    else if (name == "L_I") m.credit.L_I = value;
    else if (name == "L_C") m.credit.L_C = value;
    else if (name == "sigma") m.equity.sigma = value;
    else if (name == "S0") m.equity.S0 = value;
    else if (name == "strike") cfg.claim.strike = value;
    else if (name == "maturity") cfg.claim.maturity = value;
    else throw InvalidInput("unknown sweep axis '" + name + "'");
}

inline const std::vector<std::string>& sweep_axis_names()
{
    static const std::vector<std::string> names{"r_f",      "r_r",       "r_c",      "r_f_plus", "r_f_minus", "r_r_plus",
                                                "r_r_minus", "r_c_plus", "r_c_minus", "r_D",      "alpha",     "h_I_Q",
                                                "h_C_Q",    "h_I_P",     "h_C_P",    "L_I",      "L_C",       "sigma",
                                                "S0",       "strike",    "maturity"};
    return names;
}

} // namespace xva
