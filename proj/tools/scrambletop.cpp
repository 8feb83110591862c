// scrambletop: command-line front end for the scenario runners

#include "scrambletop/harness/config.hpp"
#include "scrambletop/harness/output.hpp"
#include "scrambletop/harness/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace scrambletop::harness;

struct Overrides {
    std::optional<std::string> output_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

void apply(const Overrides& o, ScenarioConfig& cfg) {
    if (o.threads) {
        cfg.threads = *o.threads;
    } else if (const char* env = std::getenv("SCRAMBLETOP_THREADS")) {
        try {
            cfg.threads = std::stoi(env);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("SCRAMBLETOP_THREADS is not an integer: ") + env);
        }
    }
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.seed) cfg.rng_seed = *o.seed;
    cfg.validate();
}

int report(const RunManifest& m) {
    std::cout << m.scenario << ": wrote " << m.entries.size() << " files + manifest.txt in " << std::fixed
              << std::setprecision(1) << m.wall_seconds << " s\n";
    if (!m.passed) {
        std::cerr << "validation FAILED (see validate.csv)\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward-only OTOC and classical chaos scenarios for the driven top"};
    app.require_subcommand(1);
    Overrides overrides;

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run the scenario described by a config file");
    run_cmd->add_option("config", config_path, "config file (key = value lines)")->required();

    auto* validate_cmd = app.add_subcommand("validate", "run the oracle-equivalence suite");
    app.add_subcommand("list-scenarios", "list scenario names");

    std::string manifest_path;
    auto* verify_cmd = app.add_subcommand("verify", "recompute the checksums listed in a manifest");
    verify_cmd->add_option("manifest", manifest_path, "manifest.txt path")->required();

    for (CLI::App* cmd : {run_cmd, validate_cmd}) {
        cmd->add_option_function<std::string>("--output-dir", [&](const std::string& v) { overrides.output_dir = v; },
                                              "output directory");
        cmd->add_option_function<int>("--threads", [&](int v) { overrides.threads = v; }, "worker threads")
            ->check(CLI::PositiveNumber);
        cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { overrides.seed = v; },
                                                "RNG seed");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-scenarios")) {
            for (const std::string& name : scenario_names()) std::cout << name << "  " << describe_scenario(name) << '\n';
            return 0;
        }
        if (app.got_subcommand(verify_cmd)) {
            const ManifestCheck check = verify_manifest(manifest_path);
            for (const std::string& p : check.problems) std::cerr << p << '\n';
            std::cout << (check.ok ? "manifest OK\n" : "manifest FAILED\n");
            return check.ok ? 0 : 1;
        }
        ScenarioConfig cfg;
        if (app.got_subcommand(run_cmd)) {
            cfg = load_config(config_path);
        } else {
            cfg.scenario = "validate";
            cfg.output_dir = "validate-out";
        }
        apply(overrides, cfg);
        return report(run(cfg));
    } catch (const ParseError& e) {
        std::cerr << config_path << ":" << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
