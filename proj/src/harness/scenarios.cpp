#include "scrambletop/harness/scenarios.hpp"

#include "scrambletop/classical_top.hpp"
#include "scrambletop/floquet.hpp"
#include "scrambletop/open_system.hpp"
#include "scrambletop/otoc.hpp"
#include "scrambletop/parallel.hpp"
#include "scrambletop/random_matrices.hpp"
#include "scrambletop/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>

#ifndef SCRAMBLETOP_VERSION
#define SCRAMBLETOP_VERSION "0.0.0"
#endif

namespace scrambletop::harness {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> range_times(int first, int last) {
    std::vector<double> t;
    for (int k = first; k <= last; ++k) t.push_back(k);
    return t;
}

std::string spin_tag(SpinNumber j) {
    std::string label = j.label();
    std::replace(label.begin(), label.end(), '/', '_');
    return "J" + label;
}

std::string time_tag(double t) {
    std::string s = format_double(t);
    std::replace(s.begin(), s.end(), '.', 'p');
    return "t" + s;
}

std::vector<double> thetas(const classical::Grid& g) {
    std::vector<double> out;
    for (int i = 0; i < g.n_theta; ++i) out.push_back(g.theta_at(i));
    return out;
}

std::vector<double> phis(const classical::Grid& g) {
    std::vector<double> out;
    for (int j = 0; j < g.n_phi; ++j) out.push_back(g.phi_at(j));
    return out;
}

void emit_map(OutputDir& out, const std::string& stem, const Eigen::MatrixXd& m, const classical::Grid& g) {
    out.write_matrix_csv(stem + ".csv", m, thetas(g), phis(g));
    out.write_pgm(stem + ".pgm", m);
}

FloquetOperator build_floquet(const ScenarioConfig& cfg, const QuantumParams& p, const SpinSystem& sys) {
    FloquetOptions opt;
    opt.segments = cfg.segments;
    opt.max_segments = std::max(opt.max_segments, cfg.segments);
    return floquet_operator(p, sys, opt);
}

struct OtocMaps {
    std::vector<Eigen::MatrixXd> snapshots;
    Eigen::MatrixXd mean;
};

// F at each snapshot time and its average over t = 0, …, average_periods − 1 per cell.
OtocMaps otoc_maps(const ScenarioConfig& cfg, const QuantumParams& p, const SpinSystem& sys,
                   const FloquetOperator& f, const std::vector<double>& snapshots) {
    std::set<double> all(snapshots.begin(), snapshots.end());
    for (int k = 0; k < cfg.average_periods; ++k) all.insert(k);
    const std::vector<double> times(all.begin(), all.end());
    const Evolution evolution = Evolution::from_floquet(f, p, sys);
    const classical::Grid& g = cfg.grid;

    OtocMaps maps;
    maps.snapshots.assign(snapshots.size(), Eigen::MatrixXd(g.n_theta, g.n_phi));
    maps.mean = Eigen::MatrixXd(g.n_theta, g.n_phi);
    const std::size_t cells = static_cast<std::size_t>(g.n_theta) * g.n_phi;
    parallel_for(cells, cfg.threads, [&](std::size_t c) {
        const int i = static_cast<int>(c / g.n_phi);
        const int j = static_cast<int>(c % g.n_phi);
        OtocConfig oc{g.theta_at(i), g.phi_at(j), cfg.epsilon, times, cfg.shots, derive_seed(cfg.rng_seed, c)};
        const OtocResult r = otoc_pure(oc, sys, evolution);
        double sum = 0.0;
        int count = 0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] < cfg.average_periods && times[k] == std::floor(times[k])) {
                sum += r.F[k];
                ++count;
            }
            for (std::size_t s = 0; s < snapshots.size(); ++s) {
                if (times[k] == snapshots[s]) maps.snapshots[s](i, j) = r.F[k];
            }
        }
        maps.mean(i, j) = sum / count;
    });
    return maps;
}

void run_fig2(const ScenarioConfig& cfg, OutputDir& out) {
    const classical::ClassicalParams p = cfg.params.classical();
    const classical::IntegrationOptions integ;
    const double dt = p.tau() / integ.steps_per_period;
    std::vector<std::string> header{"t_tau"};
    std::vector<std::vector<double>> columns{range_times(0, cfg.periods)};
    std::vector<std::string> traj_header{"t_tau"};
    std::vector<std::vector<double>> traj_columns{range_times(0, cfg.periods)};
    std::vector<std::vector<double>> distance(cfg.seeds.size()), variational(cfg.seeds.size());
    std::vector<std::vector<classical::Vec3>> trajectories(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t k) {
        const Seed& s = cfg.seeds[k];
        const classical::Vec3 l0 = classical::direction(s.theta, s.phi);
        // perturbation along θ̂, tangent to the sphere
        const classical::Vec3 theta_hat(std::cos(s.theta) * std::cos(s.phi), std::cos(s.theta) * std::sin(s.phi),
                                        -std::sin(s.theta));
        const classical::Vec3 delta = cfg.separation * theta_hat;
        distance[k] = classical::integrate_pair(l0, delta, cfg.periods, dt, p);
        const std::vector<double> growth = classical::variational_log_growth(l0, delta, cfg.periods, p, integ);
        variational[k].resize(growth.size());
        for (std::size_t n = 0; n < growth.size(); ++n) variational[k][n] = cfg.separation * std::exp(growth[n]);
        trajectories[k] = classical::stroboscopic_trajectory(l0, cfg.periods, p, integ);
    });
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
        header.push_back("distance_" + std::to_string(k));
        columns.push_back(distance[k]);
        header.push_back("variational_" + std::to_string(k));
        columns.push_back(variational[k]);
        for (int axis = 0; axis < 3; ++axis) {
            traj_header.push_back(std::string("L") + "xyz"[axis] + "_" + std::to_string(k));
            std::vector<double> col;
            for (const auto& l : trajectories[k]) col.push_back(l(axis));
            traj_columns.push_back(col);
        }
    }
    out.write_csv("divergence.csv", header, columns);
    out.write_csv("trajectory.csv", traj_header, traj_columns);
}

void run_fig3a(const ScenarioConfig& cfg, OutputDir& out) {
    classical::LyapunovOptions opt;
    opt.periods = cfg.periods;
    opt.n_dirs = cfg.lyapunov_dirs;
    const Eigen::MatrixXd raw = classical::lyapunov_map(cfg.grid, cfg.params.classical(), opt, cfg.threads);
    out.write_matrix_csv("lyapunov_raw.csv", raw, thetas(cfg.grid), phis(cfg.grid));
    emit_map(out, "lyapunov", raw.cwiseMax(classical::kLyapunovFloor), cfg.grid);
}

void run_fig3b(const ScenarioConfig& cfg, OutputDir& out) {
    const SpinSystem sys = make_spin<double>(cfg.params.j);
    const FloquetOperator f = build_floquet(cfg, cfg.params, sys);
    emit_map(out, "pr", pr_map(cfg.grid, f, sys, cfg.threads), cfg.grid);
    out.write_csv("floquet_summary.csv", {"segments", "convergence_gap", "min_phase_gap", "basis_dependent"},
                  {{double(f.segments)}, {f.convergence_gap}, {f.min_phase_gap}, {f.has_degenerate_phases() ? 1.0 : 0.0}});
}

void run_fig4(const ScenarioConfig& cfg, OutputDir& out) {
    const SpinSystem sys = make_spin<double>(cfg.params.j);
    const FloquetOperator f = build_floquet(cfg, cfg.params, sys);
    const OtocMaps maps = otoc_maps(cfg, cfg.params, sys, f, cfg.times);
    for (std::size_t s = 0; s < cfg.times.size(); ++s) emit_map(out, "otoc_" + time_tag(cfg.times[s]), maps.snapshots[s], cfg.grid);
    emit_map(out, "otoc_mean", maps.mean, cfg.grid);
}

void run_fig5(const ScenarioConfig& cfg, OutputDir& out) {
    for (SpinNumber j : cfg.spins) {
        QuantumParams p = cfg.params;
        p.j = j;
        const SpinSystem sys = make_spin<double>(j);
        const FloquetOperator f = build_floquet(cfg, p, sys);
        const OtocMaps maps = otoc_maps(cfg, p, sys, f, cfg.times);
        for (std::size_t s = 0; s < cfg.times.size(); ++s) {
            emit_map(out, "otoc_" + time_tag(cfg.times[s]) + "_" + spin_tag(j), maps.snapshots[s], cfg.grid);
        }
        emit_map(out, "otoc_mean_" + spin_tag(j), maps.mean, cfg.grid);
    }
}

void run_fig5b(const ScenarioConfig& cfg, OutputDir& out) {
    const SpinSystem sys = make_spin<double>(cfg.params.j);
    const FloquetOperator f = build_floquet(cfg, cfg.params, sys);
    const Evolution evolution = Evolution::from_floquet(f, cfg.params, sys);
    std::vector<OtocResult> results(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t k) {
        OtocConfig oc{cfg.seeds[k].theta, cfg.seeds[k].phi, cfg.epsilon, cfg.times, cfg.shots,
                      derive_seed(cfg.rng_seed, k)};
        results[k] = otoc_pure(oc, sys, evolution);
    });
    std::vector<std::string> header{"t_tau"};
    std::vector<std::vector<double>> columns{cfg.times};
    for (std::size_t k = 0; k < results.size(); ++k) {
        const std::string tag = std::to_string(k);
        std::vector<double> re, im;
        for (const cplx& w : results[k].expectation_W) {
            re.push_back(w.real());
            im.push_back(w.imag());
        }
        header.insert(header.end(), {"F_" + tag, "re_W_" + tag, "im_W_" + tag});
        columns.insert(columns.end(), {results[k].F, re, im});
    }
    out.write_csv("trajectories.csv", header, columns);
    std::vector<double> th, ph;
    for (const Seed& s : cfg.seeds) {
        th.push_back(s.theta);
        ph.push_back(s.phi);
    }
    out.write_csv("seeds.csv", {"theta", "phi"}, {th, ph});
}

void run_fig6(const ScenarioConfig& cfg, OutputDir& out) {
    const SpinSystem sys = make_spin<double>(cfg.params.j);
    const FloquetOperator f = build_floquet(cfg, cfg.params, sys);
    const Evolution evolution = Evolution::from_floquet(f, cfg.params, sys);
    const Seed seed = cfg.seeds.front();
    // one population set, reused for every ε
    const OtocConfig oc{seed.theta, seed.phi, cfg.epsilons.front(), cfg.times, cfg.shots, cfg.rng_seed};
    const std::vector<RealVector> pops = otoc_populations(oc, sys, evolution);
    std::vector<double> variance;
    for (const RealVector& pop : pops) variance.push_back(population_variance(pop, sys.j));

    std::vector<std::string> header{"t_tau", "variance"};
    std::vector<std::vector<double>> columns{cfg.times, variance};
    std::vector<double> deviation;
    for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
        const double eps = cfg.epsilons[e];
        const OtocResult r = otoc_from_populations(cfg.times, pops, sys.j, eps);
        VarianceCheck check{cfg.times, variance, {}};
        for (double c : r.C) check.c_over_eps2.push_back(c / (eps * eps));
        header.push_back("F_" + std::to_string(e));
        columns.push_back(r.F);
        header.push_back("C_over_eps2_" + std::to_string(e));
        columns.push_back(check.c_over_eps2);
        deviation.push_back(check.max_relative_deviation());
    }
    out.write_csv("epsilon_sweep.csv", header, columns);
    out.write_csv("epsilon_deviation.csv", {"epsilon", "max_relative_deviation"}, {cfg.epsilons, deviation});
}

bool run_validate(const ScenarioConfig& cfg, OutputDir& out) {
    const std::vector<ValidationCheck> checks = validation_suite(cfg.threads);
    std::string text = "check,value,tolerance,passed\n";
    bool ok = true;
    for (const ValidationCheck& c : checks) {
        text += c.name + "," + format_double(c.value) + "," + format_double(c.tolerance) + "," +
                (c.passed ? "1" : "0") + "\n";
        ok = ok && c.passed;
    }
    out.write_text("validate.csv", text);
    return ok;
}

}  // namespace

std::string version() { return SCRAMBLETOP_VERSION; }

std::string describe_scenario(const std::string& name) {
    static const std::map<std::string, std::string> text = {
        {"fig2-divergence", "classical pair divergence and variational growth for seeds"},
        {"fig3a-lyapunov-map", "classical Lyapunov exponent map over the (theta, phi) grid"},
        {"fig3b-pr-map", "participation ratio of each coherent state in the Floquet basis"},
        {"fig4-otoc-map", "OTOC snapshot maps and the time-averaged map"},
        {"fig5-spin-compare", "OTOC snapshot and average maps for several spins"},
        {"fig5b-trajectories", "OTOC time series for individual seeds"},
        {"fig6-epsilon-sweep", "C(t)/eps^2 against the variance for several rotation angles"},
        {"validate", "oracle-equivalence suite; nonzero exit on failure"},
    };
    const auto it = text.find(name);
    return it == text.end() ? std::string() : it->second;
}

ScenarioConfig resolve_defaults(ScenarioConfig cfg) {
    const std::string& s = cfg.scenario;
    if (s == "fig2-divergence" && cfg.seeds.empty()) cfg.seeds = {{0.6 * pi, 0.0}, {0.4 * pi, 0.0}};
    if (s == "fig4-otoc-map" && cfg.times.empty()) cfg.times = {1, 2, 5, 10, 50};
    if (s == "fig5-spin-compare") {
        if (cfg.times.empty()) cfg.times = {10};
        if (cfg.spins.empty()) {
            cfg.spins = {SpinNumber::from_twice(7), SpinNumber::from_twice(21), SpinNumber::from_twice(41)};
        }
    }
    if (s == "fig5b-trajectories") {
        if (cfg.times.empty()) cfg.times = range_times(0, 100);
        if (cfg.seeds.empty()) {
            cfg.seeds = {{0.4 * pi, 0.0}, {pi, 0.0}, {pi / 2, pi / 2}, {0.0, 0.0}, {0.6 * pi, 0.0}};
        }
    }
    if (s == "fig6-epsilon-sweep") {
        if (!cfg.spin_given) cfg.params.j = SpinNumber::from_twice(7);
        if (cfg.times.empty()) cfg.times = range_times(0, 50);
        if (cfg.seeds.empty()) cfg.seeds = {{0.6 * pi, 0.0}};
        if (cfg.epsilons.empty()) cfg.epsilons = {pi / 400, pi / 40, pi / 10, pi / 8, pi / 6, pi / 4};
    }
    return cfg;
}

RunManifest run(const ScenarioConfig& input) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioConfig cfg = resolve_defaults(input);
    cfg.validate();
    OutputDir out(cfg.output_dir);

    RunManifest manifest;
    manifest.scenario = cfg.scenario;
    manifest.config_echo = echo_config(cfg);
    manifest.version = version();

    static const std::map<std::string, std::function<void(const ScenarioConfig&, OutputDir&)>> runners = {
        {"fig2-divergence", run_fig2},      {"fig3a-lyapunov-map", run_fig3a}, {"fig3b-pr-map", run_fig3b},
        {"fig4-otoc-map", run_fig4},        {"fig5-spin-compare", run_fig5},   {"fig5b-trajectories", run_fig5b},
        {"fig6-epsilon-sweep", run_fig6},
    };
    if (cfg.scenario == "validate") {
        manifest.passed = run_validate(cfg, out);
    } else {
        runners.at(cfg.scenario)(cfg, out);
    }
    manifest.entries = out.entries();
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out.root() / "manifest.txt", manifest);
    return manifest;
}

std::vector<ValidationCheck> validation_suite(int threads) {
    std::vector<ValidationCheck> checks;
    const auto add = [&](const std::string& name, double value, double tol) {
        checks.push_back({name, value, tol, value <= tol});
    };
    CounterRng rng(20240601, 0);

    // Jacobi eigenvalues against Eigen's solver
    {
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const ComplexMatrix h = random_hermitian(12, rng);
            const Eigen::SelfAdjointEigenSolver<ComplexMatrix> ref(h);
            worst = std::max(worst, (hermitian_eig(h).eigenvalues - ref.eigenvalues()).cwiseAbs().maxCoeff());
        }
        add("hermitian_eig_vs_reference", worst, 1e-10);
    }

    // forward-only protocol against the trace oracle on the driven top
    for (int twice : {3, 7}) {
        QuantumParams p;
        p.j = SpinNumber::from_twice(twice);
        const SpinSystem sys = make_spin<double>(p.j);
        const FloquetOperator f = floquet_operator(p, sys);
        const Evolution evolution = Evolution::from_floquet(f, p, sys);
        add("floquet_self_convergence_" + spin_tag(p.j), f.convergence_gap, 1e-6);
        add("floquet_unitarity_" + spin_tag(p.j), unitarity_error(f.unitary), 1e-9);
        std::vector<double> worst(5, 0.0);
        parallel_for(worst.size(), threads, [&](std::size_t s) {
            CounterRng local(77, s);
            const double theta = pi * local.uniform(), phi = 2 * pi * local.uniform();
            const OtocConfig oc{theta, phi, pi / 40, range_times(0, 20), std::nullopt, 0};
            const OtocResult r = otoc_pure(oc, sys, evolution);
            const ComplexVector psi0 = scs(sys, theta, phi).amplitudes;
            const ComplexMatrix rho0 = psi0 * psi0.adjoint();
            const ComplexMatrix w = w_rotation(sys, theta, phi, pi / 40).matrix;
            for (std::size_t k = 0; k < oc.times.size(); ++k) {
                const cplx ref = otoc_trace_oracle(rho0, rho0, w, oc.times[k] * f.tau, evolution);
                worst[s] = std::max(worst[s], std::abs(r.F[k] - ref));
            }
        });
        add("protocol_vs_trace_oracle_" + spin_tag(p.j), *std::max_element(worst.begin(), worst.end()), 1e-10);
    }

    // Loschmidt identity, polarization, mixed and general-V paths on random systems
    {
        const Eigen::Index d = 6;
        double losch = 0.0, polar = 0.0, mixed = 0.0, general = 0.0, count_excess = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const Evolution evolution = Evolution::from_hamiltonian(random_hermitian(d, rng));
            const ComplexMatrix w = random_unitary(d, rng);
            const MeasuredUnitary mw = MeasuredUnitary::from_matrix(w);
            const double t = 3.0 * rng.uniform();
            const ComplexVector psi = random_state(d, rng);
            const ComplexMatrix rho = psi * psi.adjoint();
            losch = std::max(losch, std::abs(loschmidt_fidelity(rho, w, t, evolution) -
                                             otoc_trace_oracle(rho, rho, w, t, evolution).real()));

            const ComplexMatrix basis = random_unitary(d, rng);
            const ComplexMatrix u = evolution.propagator(t);
            const ComplexMatrix wt = u.adjoint() * w * u;
            polar = std::max(polar, std::abs(polarization_element(basis.col(0), basis.col(1), wt) -
                                             basis.col(1).dot(wt * basis.col(0))));

            RealVector weights(d);
            for (Eigen::Index k = 0; k < d; ++k) weights(k) = rng.uniform() + 0.1;
            weights /= weights.sum();
            const MixedState ms{weights, basis};
            const ComplexMatrix rho_mixed = ms.density();
            mixed = std::max(mixed, std::abs(otoc_mixed(ms, mw, t, evolution) -
                                             otoc_trace_oracle(rho_mixed, rho_mixed, w, t, evolution).real()));

            const ComplexMatrix v = random_complex(d, d, rng);
            const GeneralVResult gv = otoc_general_v(ms, v, mw, t, evolution);
            const ComplexMatrix v_full = basis * v * basis.adjoint();
            general = std::max(general, std::abs(gv.value - otoc_trace_oracle(rho_mixed, v_full, w, t, evolution)));
            count_excess = std::max(count_excess, static_cast<double>(gv.expectation_values - 2 * d * d));
        }
        add("loschmidt_identity", losch, 1e-12);
        add("polarization_element", polar, 1e-10);
        add("otoc_mixed_vs_trace_oracle", mixed, 1e-9);
        add("otoc_general_v_vs_trace_oracle", general, 1e-9);
        add("general_v_expectation_count_excess", count_excess, 0.0);
    }

    // population reuse across ε is bitwise
    {
        QuantumParams p;
        p.j = SpinNumber::from_twice(7);
        const SpinSystem sys = make_spin<double>(p.j);
        FloquetOptions fo;
        fo.certify = false;
        const Evolution evolution = Evolution::from_floquet(floquet_operator(p, sys, fo), p, sys);
        const OtocConfig a{0.6 * pi, 0.0, pi / 40, range_times(0, 10), std::nullopt, 0};
        OtocConfig b = a;
        b.epsilon = pi / 4;
        const std::vector<RealVector> pops = otoc_populations(a, sys, evolution);
        const OtocResult reused = otoc_from_populations(a.times, pops, sys.j, b.epsilon);
        const OtocResult fresh = otoc_pure(b, sys, evolution);
        double diff = 0.0;
        for (std::size_t k = 0; k < a.times.size(); ++k) diff = std::max(diff, std::abs(reused.F[k] - fresh.F[k]));
        add("population_reuse_bitwise", diff, 0.0);
    }

    // classical conservation and Jacobian
    {
        const classical::ClassicalParams p;
        const classical::Vec3 l0 = classical::direction(0.6 * pi, 0.0);
        const auto traj = classical::stroboscopic_trajectory(l0, 1000, p);
        double drift = 0.0;
        for (const auto& l : traj) drift = std::max(drift, std::abs(l.norm() - 1.0));
        add("classical_norm_drift_1000tau", drift, 1e-9);

        const classical::Mat3 jac = classical::jacobian(l0, 0.3, p);
        classical::Mat3 fd;
        const double h = 1e-6;
        for (int k = 0; k < 3; ++k) {
            classical::Vec3 e = classical::Vec3::Zero();
            e(k) = h;
            fd.col(k) = (classical::eom(l0 + e, 0.3, p) - classical::eom(l0 - e, 0.3, p)) / (2 * h);
        }
        add("jacobian_finite_difference", (jac - fd).norm() / jac.norm(), 1e-5);
    }

    // open system: product structure and closed limit
    {
        QuantumParams p;
        p.j = SpinNumber::from_twice(1);
        const SpinSystem sys = make_spin<double>(p.j);
        const ComplexVector psi = scs(sys, 0.3 * pi, 0.2).amplitudes;
        const ComplexMatrix rho = psi * psi.adjoint();
        add("doubled_evolution_dephasing_J1_2",
            doubled_evolution_check(rho, dephasing_model(p, sys, 0.1), 10 * p.tau()), 1e-9);

        const ComplexMatrix h = random_hermitian(4, rng);
        const SpinSystem s32 = make_spin<double>(SpinNumber::from_twice(3));
        const ComplexVector psi3 = scs(s32, 0.6 * pi, 0.0).amplitudes;
        const OtocConfig oc{0.6 * pi, 0.0, pi / 40, range_times(0, 10), std::nullopt, 0};
        const std::vector<double> open =
            otoc_open_approx(psi3 * psi3.adjoint(), oc, s32, LindbladModel::closed(h));
        const OtocResult closed = otoc_pure(oc, s32, Evolution::from_hamiltonian(h));
        double diff = 0.0;
        for (std::size_t k = 0; k < open.size(); ++k) diff = std::max(diff, std::abs(open[k] - closed.F[k]));
        add("open_zero_rate_vs_closed", diff, 1e-8);
    }
    return checks;
}

}  // namespace scrambletop::harness
