#include "scrambletop/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace scrambletop::harness {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) return parts;
        start = pos + 1;
    }
}

double parse_factor(std::string_view f) {
    if (f == "pi") return std::numbers::pi;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        throw std::invalid_argument("malformed number '" + std::string(f) + "'");
    }
    return value;
}

long parse_integer(std::string_view text) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("malformed integer '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_unsigned(std::string_view text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("malformed unsigned integer '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    for (std::string_view item : split(text, ',')) {
        const auto range = item.find("..");
        if (range != std::string_view::npos) {
            const long lo = parse_integer(trim(item.substr(0, range)));
            const long hi = parse_integer(trim(item.substr(range + 2)));
            if (hi < lo) throw std::invalid_argument("empty range '" + std::string(item) + "'");
            for (long k = lo; k <= hi; ++k) out.push_back(static_cast<double>(k));
        } else {
            out.push_back(parse_number(item));
        }
    }
    return out;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void check_times(const std::vector<double>& times) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        require(times[k] >= 0.0, "times must be nonnegative");
        require(k == 0 || times[k] > times[k - 1], "times must be strictly increasing");
    }
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"scenario",
         [](ScenarioConfig& c, std::string_view v) {
             const auto& names = scenario_names();
             require(std::find(names.begin(), names.end(), v) != names.end(),
                     "unknown scenario '" + std::string(v) + "'");
             c.scenario = std::string(v);
         }},
        {"alpha", [](ScenarioConfig& c, std::string_view v) { c.params.alpha = parse_number(v); }},
        {"beta", [](ScenarioConfig& c, std::string_view v) { c.params.beta = parse_number(v); }},
        {"gamma", [](ScenarioConfig& c, std::string_view v) { c.params.gamma = parse_number(v); }},
        {"omega",
         [](ScenarioConfig& c, std::string_view v) {
             c.params.omega = parse_number(v);
             require(c.params.omega > 0.0, "omega must be positive");
         }},
        {"spin",
         [](ScenarioConfig& c, std::string_view v) {
             c.params.j = SpinNumber::from_value(parse_number(v));
             c.spin_given = true;
         }},
        {"epsilon",
         [](ScenarioConfig& c, std::string_view v) {
             c.epsilon = parse_number(v);
             require(std::isfinite(c.epsilon), "epsilon must be finite");
         }},
        {"n_theta",
         [](ScenarioConfig& c, std::string_view v) {
             c.grid.n_theta = static_cast<int>(parse_integer(v));
             require(c.grid.n_theta >= 2, "n_theta must be at least 2");
         }},
        {"n_phi",
         [](ScenarioConfig& c, std::string_view v) {
             c.grid.n_phi = static_cast<int>(parse_integer(v));
             require(c.grid.n_phi >= 2, "n_phi must be at least 2");
         }},
        {"times",
         [](ScenarioConfig& c, std::string_view v) {
             c.times = parse_number_list(v);
             check_times(c.times);
         }},
        {"seeds",
         [](ScenarioConfig& c, std::string_view v) {
             c.seeds.clear();
             for (std::string_view item : split(v, ',')) {
                 const auto parts = split(item, ':');
                 require(parts.size() == 2, "seed '" + std::string(item) + "' must be theta:phi");
                 c.seeds.push_back({parse_number(parts[0]), parse_number(parts[1])});
             }
         }},
        {"spins",
         [](ScenarioConfig& c, std::string_view v) {
             c.spins.clear();
             for (std::string_view item : split(v, ',')) c.spins.push_back(SpinNumber::from_value(parse_number(item)));
         }},
        {"epsilons",
         [](ScenarioConfig& c, std::string_view v) {
             c.epsilons.clear();
             for (std::string_view item : split(v, ',')) {
                 c.epsilons.push_back(parse_number(item));
                 require(c.epsilons.back() != 0.0, "epsilons must be nonzero");
             }
         }},
        {"output_dir",
         [](ScenarioConfig& c, std::string_view v) {
             require(!v.empty(), "output_dir must not be empty");
             c.output_dir = std::string(v);
         }},
        {"rng_seed", [](ScenarioConfig& c, std::string_view v) { c.rng_seed = parse_unsigned(v); }},
        {"shots",
         [](ScenarioConfig& c, std::string_view v) {
             c.shots = parse_integer(v);
             require(*c.shots >= 1, "shots must be at least 1");
         }},
        {"threads",
         [](ScenarioConfig& c, std::string_view v) {
             c.threads = static_cast<int>(parse_integer(v));
             require(c.threads >= 1, "threads must be at least 1");
         }},
        {"periods",
         [](ScenarioConfig& c, std::string_view v) {
             c.periods = static_cast<int>(parse_integer(v));
             require(c.periods >= 1, "periods must be at least 1");
         }},
        {"lyapunov_dirs",
         [](ScenarioConfig& c, std::string_view v) {
             c.lyapunov_dirs = static_cast<int>(parse_integer(v));
             require(c.lyapunov_dirs >= 1, "lyapunov_dirs must be at least 1");
         }},
        {"separation",
         [](ScenarioConfig& c, std::string_view v) {
             c.separation = parse_number(v);
             require(c.separation > 0.0, "separation must be positive");
         }},
        {"average_periods",
         [](ScenarioConfig& c, std::string_view v) {
             c.average_periods = static_cast<int>(parse_integer(v));
             require(c.average_periods >= 1, "average_periods must be at least 1");
         }},
        {"segments",
         [](ScenarioConfig& c, std::string_view v) {
             c.segments = static_cast<int>(parse_integer(v));
             require(c.segments >= 1, "segments must be at least 1");
         }},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "fig2-divergence",   "fig3a-lyapunov-map", "fig3b-pr-map",       "fig4-otoc-map",
        "fig5-spin-compare", "fig5b-trajectories", "fig6-epsilon-sweep", "validate"};
    return names;
}

double parse_number(std::string_view text) {
    text = trim(text);
    double sign = 1.0;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        if (text.front() == '-') sign = -1.0;
        text = trim(text.substr(1));
    }
    if (text.empty()) throw std::invalid_argument("empty number");
    double value = 1.0;
    char op = '*';
    std::size_t start = 0;
    for (std::size_t k = 0; k <= text.size(); ++k) {
        if (k < text.size() && text[k] != '*' && text[k] != '/') continue;
        const double factor = parse_factor(trim(text.substr(start, k - start)));
        if (op == '*') {
            value *= factor;
        } else {
            if (factor == 0.0) throw std::invalid_argument("division by zero in '" + std::string(text) + "'");
            value /= factor;
        }
        if (k < text.size()) op = text[k];
        start = k + 1;
    }
    return sign * value;
}

void ScenarioConfig::validate() const {
    const auto& names = scenario_names();
    require(std::find(names.begin(), names.end(), scenario) != names.end(), "unknown scenario '" + scenario + "'");
    params.validate();
    grid.validate();
    check_times(times);
    require(std::isfinite(epsilon), "epsilon must be finite");
    require(!shots || *shots >= 1, "shots must be at least 1");
    require(threads >= 1, "threads must be at least 1");
    require(periods >= 1 && lyapunov_dirs >= 1 && average_periods >= 1 && segments >= 1,
            "counts must be positive");
    require(separation > 0.0, "separation must be positive");
    require(!output_dir.empty(), "output_dir must not be empty");
}

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig cfg;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second) {
            throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
        }
        if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
        try {
            it->second(cfg, value);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, std::string(key) + ": " + e.what());
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string echo_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    const auto list = [&](const char* key, const auto& items, auto&& fmt) {
        if (items.empty()) return;
        out << key << " = ";
        for (std::size_t k = 0; k < items.size(); ++k) out << (k ? ", " : "") << fmt(items[k]);
        out << '\n';
    };
    out << "scenario = " << cfg.scenario << '\n'
        << "alpha = " << format_number(cfg.params.alpha) << '\n'
        << "beta = " << format_number(cfg.params.beta) << '\n'
        << "gamma = " << format_number(cfg.params.gamma) << '\n'
        << "omega = " << format_number(cfg.params.omega) << '\n'
        << "spin = " << cfg.params.j.label() << '\n'
        << "epsilon = " << format_number(cfg.epsilon) << '\n'
        << "n_theta = " << cfg.grid.n_theta << '\n'
        << "n_phi = " << cfg.grid.n_phi << '\n';
    list("times", cfg.times, format_number);
    list("seeds", cfg.seeds, [](const Seed& s) { return format_number(s.theta) + ":" + format_number(s.phi); });
    list("spins", cfg.spins, [](SpinNumber j) { return j.label(); });
    list("epsilons", cfg.epsilons, format_number);
    out << "output_dir = " << cfg.output_dir << '\n' << "rng_seed = " << cfg.rng_seed << '\n';
    if (cfg.shots) out << "shots = " << *cfg.shots << '\n';
    out << "threads = " << cfg.threads << '\n'
        << "periods = " << cfg.periods << '\n'
        << "lyapunov_dirs = " << cfg.lyapunov_dirs << '\n'
        << "separation = " << format_number(cfg.separation) << '\n'
        << "average_periods = " << cfg.average_periods << '\n'
        << "segments = " << cfg.segments << '\n';
    return out.str();
}

}  // namespace scrambletop::harness
