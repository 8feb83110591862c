// scenarios.hpp: scenario runners and the built-in validation suite

#pragma once

#include "scrambletop/harness/config.hpp"
#include "scrambletop/harness/output.hpp"

#include <string>
#include <vector>

namespace scrambletop::harness {

std::string version();

// One-line description per scenario name.
std::string describe_scenario(const std::string& name);

// Fills scenario-specific defaults for empty lists (times, seeds, spins, epsilons) and
// the fig6 spin.
ScenarioConfig resolve_defaults(ScenarioConfig cfg);

// Runs the scenario, writes its outputs and `manifest.txt` into cfg.output_dir.
RunManifest run(const ScenarioConfig& cfg);

struct ValidationCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

// Oracle-equivalence checks at small sizes (runs in seconds).
std::vector<ValidationCheck> validation_suite(int threads = 1);

}  // namespace scrambletop::harness
