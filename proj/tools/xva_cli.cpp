#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "xva/xva.hpp"

namespace {

int load(const std::string& file, xva::ScenarioConfig& cfg)
{
    std::ifstream in(file);
    if (!in) {
        std::cerr << "cannot read " << file << "\n";
        return xva::exit_code::validation;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        cfg = xva::parse_scenario_text(ss.str());
    } catch (const xva::Error& e) {
        std::cerr << "invalid scenario " << file << ": " << e.what() << "\n";
        return xva::exit_code::validation;
    }
    return xva::exit_code::ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Valuation adjustments for European claims under funding, repo, collateral and default risk"};
    app.require_subcommand(1);

    std::string file;
    std::string out_dir = ".";
    bool force = false;
    std::vector<std::string> axis_specs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", file, "scenario JSON file")->required();
        sub->add_option("--out", out_dir, "directory for CSV artifacts")->capture_default_str();
        sub->add_flag("--force", force, "run even when rate inequalities are violated");
    };
    struct Entry {
        const char* name;
        const char* help;
        xva::Command cmd;
    };
    const Entry entries[] = {
        {"validate", "check the scenario and list violated rate inequalities", xva::Command::validate},
        {"price", "value the claim with the engines named by run.mode (xva.csv)", xva::Command::price},
        {"interval", "buyer and seller prices (interval.csv)", xva::Command::interval},
        {"hedge", "replicating positions (hedge.csv)", xva::Command::hedge},
        {"sweep", "parameter sweep (sweep.csv)", xva::Command::sweep},
        {"crosscheck", "compare closed form, lattice and Monte Carlo (crosscheck.csv, xva.csv)",
         xva::Command::crosscheck},
    };
    std::vector<std::pair<CLI::App*, xva::Command>> subs;
    for (const auto& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        add_common(sub);
        if (e.cmd == xva::Command::sweep) {
            sub->add_option("--axis", axis_specs, "name=a:b:step or name=v1,v2,... (repeatable)");
        }
        subs.emplace_back(sub, e.cmd);
    }
    std::string schema_out;
    CLI::App* schema = app.add_subcommand("schema", "print the scenario file reference (markdown)");
    schema->add_option("--out", schema_out, "write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : xva::exit_code::validation;
    }

    if (schema->parsed()) {
        if (schema_out.empty()) {
            std::cout << xva::schema_markdown();
        } else {
            std::ofstream f(schema_out);
            f << xva::schema_markdown();
            if (!f) {
                std::cerr << "cannot write " << schema_out << "\n";
                return xva::exit_code::numerical;
            }
        }
        return xva::exit_code::ok;
    }

    xva::Command cmd = xva::Command::validate;
    for (const auto& [sub, c] : subs) {
        if (sub->parsed()) cmd = c;
    }

    xva::ScenarioConfig cfg;
    if (const int rc = load(file, cfg); rc != 0) return rc;

    std::vector<xva::SweepAxis> axes;
    try {
        for (const auto& s : axis_specs) axes.push_back(xva::parse_axis_spec(s));
    } catch (const xva::Error& e) {
        std::cerr << e.what() << "\n";
        return xva::exit_code::validation;
    }
    if (cmd == xva::Command::sweep && axes.empty() && cfg.run.sweep.empty()) {
        std::cerr << "sweep needs --axis or run.sweep in the scenario\n";
        return xva::exit_code::validation;
    }

    xva::RunOutcome outcome = xva::run_command(cmd, cfg, force, axes);
    for (const auto& m : outcome.messages) std::cerr << m << "\n";
    if (!outcome.artifacts.empty()) {
        try {
            xva::write_artifacts(out_dir, outcome.artifacts);
        } catch (const std::exception& e) {
            std::cerr << "writing artifacts failed: " << e.what() << "\n";
            return xva::exit_code::numerical;
        }
        for (const auto& [name, text] : outcome.artifacts) {
            if (name == "violations.csv") continue;
            std::cout << "== " << name << "\n" << text;
        }
    }
    return outcome.exit_code;
}
