// readout-sim: command-line front end for the readout simulator.
//
//   readout-sim rates    --config F
//   readout-sim simulate --config F [--out F.csv]
//   readout-sim compare  --config F
//   readout-sim figure   {fig2a|fig2b|fig3} --out DIR
//   readout-sim chain    --config F [--out F.csv]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "readout/errors.hpp"
#include "readout/scenario.hpp"

namespace fs = std::filesystem;
using namespace readout;

namespace {

constexpr int exit_config = 1;
constexpr int exit_numerical = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path, "", 0);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string(), "out", 0);
    }
    out << content;
}

void report_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

std::string preset_file_stem(const std::string& name, const Scenario& s) {
    if (name != "fig3") {
        return name;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "fig3_theta%g", s.theta_deg);
    return buf;
}

int run_simulate(const std::string& config, const std::string& out_flag, bool chain_only) {
    const Scenario s = parse_config(read_file(config));
    if (chain_only && s.engine != Engine::chain) {
        throw ConfigError("the chain command needs engine = chain", "engine", 0);
    }
    const std::string out = out_flag.empty() ? s.out : out_flag;
    if (out.empty() && !chain_only) {
        throw ConfigError("no output path: pass --out or set out in the config", "out", 0);
    }
    const auto result = run_scenario(s);
    report_warnings(result.warnings);
    if (!out.empty()) {
        write_file(out, to_csv(result.trace));
    }
    std::cout << to_json(result.summary);
    return 0;
}

int run_rates(const std::string& config) {
    const Scenario s = parse_config(read_file(config));
    if (s.engine == Engine::chain) {
        throw ConfigError("rates are defined for the two-qubit model", "engine", 0);
    }
    const auto summary = rates_summary(s.model);
    report_warnings(validate_regime(s.model).warnings);
    std::cout << to_json(summary);
    return 0;
}

int run_compare(const std::string& config) {
    const Scenario s = parse_config(read_file(config));
    const auto c = compare(s);
    report_warnings(c.warnings);
    std::cout << to_json(c.summary);
    return 0;
}

int run_figure(const std::string& name, const std::string& dir) {
    if (!is_preset(name)) {
        throw ConfigError("unknown figure '" + name + "'", "figure", 0);
    }
    fs::create_directories(dir);
    for (const auto& s : preset_runs(name)) {
        const auto result = run_scenario(s, preset_fit_windows(s.model.gamma));
        report_warnings(result.warnings);
        const std::string stem = preset_file_stem(name, s);
        write_file(fs::path(dir) / (stem + ".csv"), to_csv(result.trace));
        write_file(fs::path(dir) / (stem + ".json"), to_json(result.summary));
        write_file(fs::path(dir) / (stem + ".cfg"), render(s));
        std::cout << stem << ": " << (fs::path(dir) / (stem + ".csv")).string() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous readout of a qubit through a decaying detector"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string figure_name;

    auto* rates = app.add_subcommand("rates", "Analytic and spectral decay rates for a configuration");
    rates->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write its CSV trace");
    simulate->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", out, "CSV output path (overrides the config)");

    auto* cmp = app.add_subcommand("compare", "Continuous vs projective vs direct-damping readout");
    cmp->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);

    auto* figure = app.add_subcommand("figure", "Reproduce a preset figure");
    figure->add_option("name", figure_name, "fig2a, fig2b or fig3")
        ->required()
        ->check(CLI::IsMember({"fig2a", "fig2b", "fig3"}));
    figure->add_option("--out", out, "Output directory")->required();

    auto* chain = app.add_subcommand("chain", "Run a chain scenario");
    chain->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    chain->add_option("--out", out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (rates->parsed()) {
            return run_rates(config);
        }
        if (simulate->parsed()) {
            return run_simulate(config, out, false);
        }
        if (cmp->parsed()) {
            return run_compare(config);
        }
        if (figure->parsed()) {
            return run_figure(figure_name, out);
        }
        if (chain->parsed()) {
            return run_simulate(config, out, true);
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return exit_config;
}
