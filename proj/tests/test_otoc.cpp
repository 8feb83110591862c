#include "scrambletop/otoc.hpp"
#include "scrambletop/random_matrices.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace scrambletop;

namespace {

constexpr double pi = std::numbers::pi;

struct Top7 {
    QuantumParams p;
    SpinSystem sys;
    FloquetOperator f;
    Evolution ev;

    Top7()
        : p([] {
              QuantumParams q;
              q.j = SpinNumber::from_twice(7);
              return q;
          }()),
          sys(make_spin<double>(p.j)),
          f(floquet_operator(p, sys)),
          ev(Evolution::from_floquet(f, p, sys)) {}
};

const Top7& top() {
    static const Top7 t;
    return t;
}

OtocConfig config(double theta, double phi, double eps, std::vector<double> times) {
    OtocConfig cfg;
    cfg.theta = theta;
    cfg.phi = phi;
    cfg.epsilon = eps;
    cfg.times = std::move(times);
    return cfg;
}

ComplexMatrix projector(const ComplexVector& psi) { return psi * psi.adjoint(); }

MixedState random_mixed(Eigen::Index d, Eigen::Index r, CounterRng& rng) {
    MixedState ms;
    ms.basis = random_unitary(d, rng).leftCols(r);
    ms.weights = RealVector(r);
    for (Eigen::Index k = 0; k < r; ++k) ms.weights(k) = 0.1 + rng.uniform();
    ms.weights /= ms.weights.sum();
    return ms;
}

}  // namespace

TEST(Evolution, HamiltonianPropagatorMatchesExponential) {
    CounterRng rng(31, 0);
    const ComplexMatrix h = random_hermitian(5, rng);
    const Evolution ev = Evolution::from_hamiltonian(h);
    EXPECT_LT(max_abs(ev.propagator(0.8) - expm_i_hermitian(h, 0.8)), 1e-13);
    EXPECT_THROW(ev.propagator(-1.0), std::invalid_argument);
    EXPECT_THROW(Evolution::from_hamiltonian(h, 0.0), std::invalid_argument);
}

TEST(Evolution, TrajectoryMatchesIndependentApplication) {
    const Top7& t = top();
    CounterRng rng(32, 0);
    const ComplexVector psi = random_state(t.sys.dimension(), rng);
    const double tau = t.p.tau();
    const std::vector<double> times{0.0, 0.5 * tau, 3 * tau, 3.25 * tau, 7 * tau};
    const std::vector<ComplexVector> traj = t.ev.trajectory(psi, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        EXPECT_LT((traj[k] - t.ev.apply(psi, times[k])).norm(), 1e-12);
        EXPECT_LT((traj[k] - t.ev.propagator(times[k]) * psi).norm(), 1e-12);
    }
    EXPECT_THROW(t.ev.trajectory(psi, {2 * tau, tau}), std::invalid_argument);
}

TEST(Otoc, UnityAtTimeZero) {
    const Top7& t = top();
    for (auto [theta, phi] : {std::pair{0.6 * pi, 0.0}, std::pair{1.1, 2.0}}) {
        const OtocResult r = otoc_pure(config(theta, phi, pi / 40, {0.0}), t.sys, t.ev);
        EXPECT_NEAR(r.F[0], 1.0, 1e-13);
        EXPECT_NEAR(r.C[0], 0.0, 1e-13);
    }
}

TEST(Otoc, UnityAtZeroStrength) {
    const Top7& t = top();
    const OtocResult r = otoc_pure(config(0.6 * pi, 0.0, 0.0, {0, 1, 5, 20}), t.sys, t.ev);
    for (double f : r.F) EXPECT_NEAR(f, 1.0, 1e-12);
}

TEST(Otoc, BoundedAndComplementary) {
    const Top7& t = top();
    std::vector<double> times;
    for (int k = 0; k <= 30; ++k) times.push_back(k);
    const OtocResult r = otoc_pure(config(0.6 * pi, 0.0, pi / 8, times), t.sys, t.ev);
    const std::vector<double> c = scrambling_series(r);
    for (std::size_t k = 0; k < times.size(); ++k) {
        EXPECT_GE(r.F[k], -1e-14);
        EXPECT_LE(r.F[k], 1.0 + 1e-12);
        EXPECT_DOUBLE_EQ(c[k], 1.0 - r.F[k]);
        EXPECT_DOUBLE_EQ(r.C[k], c[k]);
        EXPECT_NEAR(r.populations[k].sum(), 1.0, 1e-12);
    }
}

TEST(Otoc, MatchesTraceOracle) {
    const Top7& t = top();
    for (auto [theta, phi] : {std::pair{0.6 * pi, 0.0}, std::pair{0.4 * pi, 0.0}, std::pair{2.0, 4.0}}) {
        const double eps = pi / 40;
        const OtocResult r = otoc_pure(config(theta, phi, eps, {1, 2, 7, 15}), t.sys, t.ev);
        const ComplexMatrix v = projector(scs(t.sys, theta, phi).amplitudes);
        const ComplexMatrix w = w_rotation(t.sys, theta, phi, eps).matrix;
        for (std::size_t k = 0; k < r.times.size(); ++k) {
            const cplx oracle = otoc_trace_oracle(v, v, w, r.times[k] * t.p.tau(), t.ev);
            EXPECT_NEAR(r.F[k], oracle.real(), 1e-10);
            EXPECT_NEAR(oracle.imag(), 0.0, 1e-10);
        }
    }
}

TEST(Otoc, FloquetOverloadAgreesWithEvolutionOverload) {
    const Top7& t = top();
    const OtocConfig cfg = config(0.6 * pi, 0.0, pi / 40, {1, 3});
    const OtocResult a = otoc_pure(cfg, t.p, t.sys, t.f);
    const OtocResult b = otoc_pure(cfg, t.sys, t.ev);
    EXPECT_EQ(a.F, b.F);
}

TEST(Otoc, PopulationReuseAcrossStrengths) {
    const Top7& t = top();
    const OtocConfig base = config(0.6 * pi, 0.0, 0.0, {0, 1, 4, 9});
    const std::vector<RealVector> pops = otoc_populations(base, t.sys, t.ev);
    for (double eps : {pi / 400, pi / 40, pi / 4}) {
        OtocConfig cfg = base;
        cfg.epsilon = eps;
        const OtocResult direct = otoc_pure(cfg, t.sys, t.ev);
        const OtocResult reused = otoc_from_populations(base.times, pops, t.sys.j, eps);
        EXPECT_EQ(direct.F, reused.F);
        for (std::size_t k = 0; k < direct.F.size(); ++k) {
            const ComplexVector psi = t.ev.apply(scs(t.sys, base.theta, base.phi).amplitudes, base.times[k] * t.p.tau());
            const cplx w = psi.dot(w_rotation(t.sys, base.theta, base.phi, eps).matrix * psi);
            EXPECT_NEAR(reused.F[k], std::norm(w), 1e-12);
        }
    }
}

TEST(Otoc, ShotsAreDeterministicPerSeed) {
    const Top7& t = top();
    OtocConfig cfg = config(0.6 * pi, 0.0, pi / 40, {1, 5});
    cfg.shots = 500;
    cfg.rng_seed = 9;
    const OtocResult a = otoc_pure(cfg, t.sys, t.ev);
    const OtocResult b = otoc_pure(cfg, t.sys, t.ev);
    EXPECT_EQ(a.F, b.F);
    cfg.rng_seed = 10;
    EXPECT_NE(otoc_pure(cfg, t.sys, t.ev).F, a.F);
    for (const RealVector& p : a.populations) {
        EXPECT_NEAR(p.sum(), 1.0, 1e-12);
        for (Eigen::Index m = 0; m < p.size(); ++m) {
            EXPECT_DOUBLE_EQ(p(m) * 500, std::round(p(m) * 500));
        }
    }
    EXPECT_EQ(a.shots, std::optional<long>(500));
    EXPECT_EQ(a.rng_seed, 9u);
}

TEST(Otoc, ShotEstimateOfExpectationIsUnbiased) {
    const Top7& t = top();
    OtocConfig cfg = config(0.6 * pi, 0.0, pi / 4, {6});
    const cplx exact = otoc_pure(cfg, t.sys, t.ev).expectation_W[0];
    cfg.shots = 200;
    constexpr int replicas = 200;
    cplx sum = 0.0;
    double sum_sq_re = 0.0, sum_sq_im = 0.0;
    for (int r = 0; r < replicas; ++r) {
        cfg.rng_seed = 1000 + r;
        const cplx w = otoc_pure(cfg, t.sys, t.ev).expectation_W[0];
        sum += w;
        sum_sq_re += w.real() * w.real();
        sum_sq_im += w.imag() * w.imag();
    }
    const cplx mean = sum / double(replicas);
    const double se_re = std::sqrt((sum_sq_re / replicas - mean.real() * mean.real()) / replicas);
    const double se_im = std::sqrt((sum_sq_im / replicas - mean.imag() * mean.imag()) / replicas);
    EXPECT_LT(std::abs(mean.real() - exact.real()), 3 * se_re + 1e-12);
    EXPECT_LT(std::abs(mean.imag() - exact.imag()), 3 * se_im + 1e-12);
}

TEST(Otoc, ConfigValidation) {
    EXPECT_THROW(config(0, 0, 0.1, {2, 1}).validate(), std::invalid_argument);
    EXPECT_THROW(config(0, 0, 0.1, {1, 1}).validate(), std::invalid_argument);
    EXPECT_THROW(config(0, 0, 0.1, {-1}).validate(), std::invalid_argument);
    EXPECT_THROW(config(std::nan(""), 0, 0.1, {1}).validate(), std::invalid_argument);
    OtocConfig cfg = config(0, 0, 0.1, {1});
    cfg.shots = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    const Top7& t = top();
    EXPECT_THROW(otoc_pure(config(0, 0, 0.1, {1}), make_spin<double>(1.5), t.ev), std::invalid_argument);
}

TEST(Otoc, LoschmidtIdentity) {
    const Top7& t = top();
    CounterRng rng(33, 0);
    const ComplexVector psi = random_state(t.sys.dimension(), rng);
    const ComplexMatrix w = random_unitary(t.sys.dimension(), rng);
    const double time = 4 * t.p.tau();
    const ComplexMatrix u = t.ev.propagator(time);
    const cplx amp = psi.dot(u.adjoint() * w * u * psi);
    EXPECT_NEAR(loschmidt_fidelity(projector(psi), w, time, t.ev), std::norm(amp), 1e-12);
    EXPECT_THROW(loschmidt_fidelity(ComplexMatrix::Identity(8, 8) / 8.0, w, time, t.ev),
                 std::invalid_argument);
}

TEST(Otoc, CommutatorEqualsOneMinusF) {
    const Top7& t = top();
    const double eps = pi / 10;
    const OtocResult r = otoc_pure(config(0.6 * pi, 0.0, eps, {3}), t.sys, t.ev);
    const ComplexMatrix v = projector(scs(t.sys, 0.6 * pi, 0.0).amplitudes);
    const ComplexMatrix w = w_rotation(t.sys, 0.6 * pi, 0.0, eps).matrix;
    EXPECT_NEAR(scrambling_commutator(v, v, w, 3 * t.p.tau(), t.ev), r.C[0], 1e-11);
}

TEST(Otoc, TraceOracleRejectsUnnormalizedState) {
    const Top7& t = top();
    const ComplexMatrix id = ComplexMatrix::Identity(8, 8);
    EXPECT_THROW(otoc_trace_oracle(id, id, id, 1.0, t.ev), std::invalid_argument);
}

TEST(Polarization, RecoversMatrixElements) {
    CounterRng rng(34, 0);
    const ComplexMatrix basis = random_unitary(6, rng);
    const ComplexMatrix w = random_unitary(6, rng);
    const auto expect = [&](const ComplexVector& chi) { return chi.dot(w * chi); };
    for (int n = 0; n < 6; ++n) {
        for (int m = 0; m < 6; ++m) {
            if (n == m) continue;
            const ComplexVector bn = basis.col(n), bm = basis.col(m);
            const cplx direct = bm.dot(w * bn);
            EXPECT_LT(std::abs(polarization_element(bn, bm, expect) - direct), 1e-13);
            EXPECT_LT(std::abs(polarization_element(bn, bm, w) - direct), 1e-13);
        }
    }
}

TEST(Polarization, StatesAreNormalizedAndRejectBadInput) {
    const ComplexVector n = ComplexVector::Unit(3, 0), m = ComplexVector::Unit(3, 2);
    const PolarizationStates s = polarization_states(n, m);
    for (const ComplexVector* v : {&s.a_plus, &s.a_minus, &s.b_plus, &s.b_minus}) {
        EXPECT_NEAR(v->norm(), 1.0, 1e-15);
    }
    EXPECT_THROW(polarization_states(n, n), std::invalid_argument);
    EXPECT_THROW(polarization_states(n, 2.0 * m), std::invalid_argument);
    EXPECT_THROW(polarization_states(n, ComplexVector::Unit(2, 0)), std::invalid_argument);
}

TEST(Protocol, MeasurementMatchesHeisenbergExpectation) {
    const Top7& t = top();
    CounterRng rng(35, 0);
    const MeasuredUnitary w = MeasuredUnitary::from_rotation(w_rotation(t.sys, 1.0, 0.3, pi / 8));
    const double time = 2.5 * t.p.tau();
    ProtocolMeasurement measure(w, t.ev, time);
    const ComplexMatrix u = t.ev.propagator(time);
    const ComplexMatrix wt = u.adjoint() * w.matrix() * u;
    for (int k = 0; k < 5; ++k) {
        const ComplexVector chi = random_state(8, rng);
        EXPECT_LT(std::abs(measure(chi) - chi.dot(wt * chi)), 1e-12);
    }
    EXPECT_EQ(measure.count(), 5);
}

TEST(Protocol, MeasuredUnitaryFromMatrixReconstructs) {
    CounterRng rng(36, 0);
    const ComplexMatrix w = random_unitary(7, rng);
    const MeasuredUnitary mu = MeasuredUnitary::from_matrix(w);
    EXPECT_LT(max_abs(mu.matrix() - w), 1e-12);
    const ComplexVector psi = random_state(7, rng);
    EXPECT_LT(std::abs(mu.expectation(mu.populations(psi)) - psi.dot(w * psi)), 1e-12);
}

TEST(Mixed, ValidationRejectsBadStates) {
    CounterRng rng(37, 0);
    MixedState ms = random_mixed(4, 2, rng);
    EXPECT_NO_THROW(ms.validate());
    MixedState bad = ms;
    bad.weights(0) += 0.1;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = ms;
    bad.weights << 1.2, -0.2;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = ms;
    bad.basis.col(1) = bad.basis.col(0);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = ms;
    bad.weights = RealVector::Ones(3) / 3.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Mixed, DensityIsUnitTraceHermitian) {
    CounterRng rng(38, 0);
    const MixedState ms = random_mixed(5, 3, rng);
    const ComplexMatrix rho = ms.density();
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
    EXPECT_LT(hermiticity_error(rho), 1e-15);
}

TEST(Mixed, HeisenbergElementsAndCount) {
    const Top7& t = top();
    CounterRng rng(39, 0);
    const MixedState ms = random_mixed(8, 3, rng);
    const MeasuredUnitary w = MeasuredUnitary::from_rotation(w_rotation(t.sys, 0.6 * pi, 0.0, pi / 40));
    const double time = 5 * t.p.tau();
    ProtocolMeasurement measure(w, t.ev, time);
    const ComplexMatrix a = heisenberg_elements(ms.basis, measure);
    const ComplexMatrix u = t.ev.propagator(time);
    const ComplexMatrix direct = ms.basis.adjoint() * u.adjoint() * w.matrix() * u * ms.basis;
    EXPECT_LT(max_abs(a - direct), 1e-12);
    EXPECT_EQ(measure.count(), 2 * 3 * 3 - 3);
}

TEST(Mixed, MatchesBruteForceSumAndTraceOracle) {
    const Top7& t = top();
    CounterRng rng(40, 0);
    const MixedState ms = random_mixed(8, 4, rng);
    const MeasuredUnitary w = MeasuredUnitary::from_rotation(w_rotation(t.sys, 0.6 * pi, 0.0, pi / 10));
    for (double periods : {0.0, 2.0, 9.0}) {
        const double time = periods * t.p.tau();
        const ComplexMatrix u = t.ev.propagator(time);
        const ComplexMatrix wt = u.adjoint() * w.matrix() * u;
        double brute = 0.0;
        for (Eigen::Index m = 0; m < 4; ++m) {
            for (Eigen::Index n = 0; n < 4; ++n) {
                const ComplexVector bm = ms.basis.col(m), bn = ms.basis.col(n);
                brute += ms.weights(n) * ms.weights(n) * ms.weights(m) * std::norm(bm.dot(wt * bn));
            }
        }
        const double f = otoc_mixed(ms, w, time, t.ev);
        EXPECT_NEAR(f, brute, 1e-12);
        const ComplexMatrix rho = ms.density();
        EXPECT_NEAR(f, otoc_trace_oracle(rho, rho, w.matrix(), time, t.ev).real(), 1e-11);
    }
}

TEST(Mixed, MaximallyMixedQubit) {
    const SpinSystem sys = make_spin<double>(0.5);
    const Evolution ev = Evolution::from_hamiltonian(sys.jx);
    MixedState ms;
    ms.weights = RealVector::Constant(2, 0.5);
    ms.basis = ComplexMatrix::Identity(2, 2);
    const MeasuredUnitary w = MeasuredUnitary::from_rotation(w_rotation(sys, 0.3, 0.2, 1.1));
    for (double time : {0.0, 0.7, 2.0}) EXPECT_NEAR(otoc_mixed(ms, w, time, ev), 0.25, 1e-14);
}

TEST(Mixed, PureLimitMatchesPureOtoc) {
    const Top7& t = top();
    const OtocConfig cfg = config(0.6 * pi, 0.0, pi / 40, {0, 2, 6});
    MixedState ms;
    ms.weights = RealVector::Ones(1);
    ms.basis = scs(t.sys, cfg.theta, cfg.phi).amplitudes;
    const std::vector<double> mixed = otoc_mixed(ms, cfg, t.sys, t.ev);
    const OtocResult pure = otoc_pure(cfg, t.sys, t.ev);
    for (std::size_t k = 0; k < mixed.size(); ++k) EXPECT_NEAR(mixed[k], pure.F[k], 1e-12);
}

TEST(GeneralV, MatchesTraceOracleWithinExpectationBudget) {
    const Top7& t = top();
    CounterRng rng(41, 0);
    const MixedState ms = random_mixed(8, 3, rng);
    const MeasuredUnitary w = MeasuredUnitary::from_rotation(w_rotation(t.sys, 1.2, 0.5, pi / 6));
    const ComplexMatrix vc = random_complex(3, 3, rng);
    const ComplexMatrix v = ms.basis * vc * ms.basis.adjoint();
    const double time = 4 * t.p.tau();
    const GeneralVResult r = otoc_general_v(ms, vc, w, time, t.ev);
    EXPECT_LT(std::abs(r.value - otoc_trace_oracle(ms.density(), v, w.matrix(), time, t.ev)), 1e-11);
    EXPECT_LE(r.expectation_values, 2 * 8 * 8);
    EXPECT_EQ(r.expectation_values, 2 * 3 * 3 - 3);
}

TEST(GeneralV, DensityAsVReducesToMixedOtoc) {
    const Top7& t = top();
    CounterRng rng(42, 0);
    const MixedState ms = random_mixed(8, 3, rng);
    const MeasuredUnitary w = MeasuredUnitary::from_rotation(w_rotation(t.sys, 0.6 * pi, 0.0, pi / 40));
    const double time = 3 * t.p.tau();
    const GeneralVResult r = otoc_general_v(ms, ComplexMatrix(ms.weights.cast<cplx>().asDiagonal()), w, time, t.ev);
    EXPECT_NEAR(r.value.real(), otoc_mixed(ms, w, time, t.ev), 1e-12);
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-12);
}

TEST(Variance, PopulationVarianceClosedForms) {
    const SpinNumber j = SpinNumber::from_twice(7);
    RealVector e = RealVector::Zero(8);
    e(0) = 1.0;
    EXPECT_DOUBLE_EQ(population_variance(e, j), 0.0);
    EXPECT_NEAR(population_variance(RealVector::Constant(8, 1.0 / 8), j), (64.0 - 1.0) / 12.0, 1e-13);
    RealVector two = RealVector::Zero(8);
    two(0) = two(7) = 0.5;
    EXPECT_NEAR(population_variance(two, j), 3.5 * 3.5, 1e-13);
}

TEST(Variance, SmallStrengthLawAndZeroAtStart) {
    const Top7& t = top();
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(k);
    const VarianceCheck check = variance_check(config(0.6 * pi, 0.0, pi / 400, times), t.sys, t.ev);
    EXPECT_NEAR(check.variance[0], 0.0, 1e-12);
    EXPECT_NEAR(check.c_over_eps2[0], 0.0, 1e-6);
    EXPECT_LT(check.max_relative_deviation(), 0.05);
    for (std::size_t k = 0; k < times.size(); ++k) EXPECT_GE(check.variance[k], -1e-12);
}
