// config.hpp: scenario configuration and its line-oriented text format
//
//   # comment
//   scenario = fig4-otoc-map
//   spin = 41/2
//   epsilon = pi/40
//   seeds = 0.4*pi:0, 0.6*pi:0
//   times = 1, 2, 5, 10, 50       (or a range such as 0..100)
//
// Numbers accept the forms x, x*pi, pi/x, x*pi/y and x/y.

#pragma once

#include "scrambletop/classical_top.hpp"
#include "scrambletop/floquet.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scrambletop::harness {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

const std::vector<std::string>& scenario_names();

struct Seed {
    double theta = 0.0;
    double phi = 0.0;
};

struct ScenarioConfig {
    std::string scenario = "validate";
    QuantumParams params;
    // true when `spin` was given explicitly (fig6 otherwise uses J = 7/2)
    bool spin_given = false;
    double epsilon = std::numbers::pi / 40.0;
    classical::Grid grid;
    std::vector<double> times;
    std::vector<Seed> seeds;
    std::vector<SpinNumber> spins;
    std::vector<double> epsilons;
    std::string output_dir = "out";
    std::uint64_t rng_seed = 0;
    std::optional<long> shots;
    int threads = 1;
    // classical duration in periods (Lyapunov maps, divergence series)
    int periods = 1000;
    int lyapunov_dirs = 360;
    double separation = 1e-8;
    // OTOC time averages run over t = 0, 1, …, average_periods − 1 (in τ)
    int average_periods = 100;
    int segments = 2000;

    void validate() const;
};

// Evaluates a scalar literal such as "3*pi/4", "pi/40", "41/2" or "-1e-3".
double parse_number(std::string_view text);

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

// key = value lines reproducing cfg (used for the manifest echo).
std::string echo_config(const ScenarioConfig& cfg);

}  // namespace scrambletop::harness
