// thermostat: command-line front end for scenario runs.
//
//   thermostat simulate            --config FILE --controls_csv FILE
//   thermostat optimize-thermostat --config FILE
//   thermostat baseline            --config FILE [--which constant|precool|both]
//   thermostat optimize-prices     --config FILE
//   thermostat verify              [--cases N] [--seed S]
//
// Every config key is also a flag (--key value) that overrides the file.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "thermo/oracle.hpp"
#include "thermo/scenario_io.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "scenario file (key = value)");
    cmd->add_option("-o,--out", args.out_dir, "output directory (overrides output_dir)");
    for (const auto& key : thermo::config_keys())
        cmd->add_option("--" + key, args.overrides[key], "override config key '" + key + "'");
}

thermo::ScenarioConfig load(const CommonArgs& args, const std::string& strategies) {
    thermo::KeyValueConfig kv;
    if (!args.config_path.empty()) kv = thermo::KeyValueConfig::load(args.config_path);
    for (const auto& [key, value] : args.overrides)
        if (!value.empty()) kv.set(key, value);
    if (!args.out_dir.empty()) kv.set("output_dir", args.out_dir);
    if (!strategies.empty()) kv.set("strategies", strategies);
    return thermo::ScenarioConfig::from(kv);
}

int run(const thermo::ScenarioConfig& config) {
    const auto results = thermo::run_scenario(config);
    const auto files = thermo::emit_results(results, config.output_dir, config.dt_hours);
    std::cout << thermo::format_report(results);
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    return 0;
}

int verify(int cases, std::uint64_t seed) {
    const auto report = thermo::verify_dp_against_oracle(cases, seed);
    int failures = 0;
    int feasible = 0;
    for (std::size_t i = 0; i < report.size(); ++i) {
        const auto& c = report[i];
        feasible += c.feasible ? 1 : 0;
        const bool ok = c.values_match && c.controls_match;
        if (!ok) ++failures;
        std::cout << "instance " << i << ": " << (c.feasible ? "feasible" : "infeasible")
                  << "  oracle=" << c.oracle_value << "  dp=" << c.dp_value << "  " << (ok ? "ok" : "MISMATCH")
                  << "\n";
    }
    std::cout << feasible << " feasible instances, " << failures << " mismatches\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal thermostat programming and demand-charge pricing"};
    app.require_subcommand(1);

    CommonArgs sim_args, opt_args, base_args, price_args;
    auto* sim = app.add_subcommand("simulate", "simulate a fixed control sequence");
    add_common(sim, sim_args);
    auto* opt = app.add_subcommand("optimize-thermostat", "dynamic-programming thermostat schedule");
    add_common(opt, opt_args);
    auto* base = app.add_subcommand("baseline", "constant and precooling schedules");
    add_common(base, base_args);
    std::string which = "both";
    base->add_option("--which", which, "constant, precool or both")
        ->check(CLI::IsMember({"constant", "precool", "both"}));
    auto* prices = app.add_subcommand("optimize-prices", "revenue-neutral price search");
    add_common(prices, price_args);

    auto* ver = app.add_subcommand("verify", "check the DP against exhaustive enumeration");
    int cases = 20;
    std::uint64_t seed = 2015;
    ver->add_option("--cases", cases, "number of feasible random instances")->check(CLI::PositiveNumber);
    ver->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return run(load(sim_args, "simulated"));
        if (*opt) return run(load(opt_args, "optimal"));
        if (*base) return run(load(base_args, which == "both" ? "constant,precool" : which));
        if (*prices) return run(load(price_args, "prices"));
        if (*ver) return verify(cases, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
