#include "scrambletop/open_system.hpp"
#include "scrambletop/random_matrices.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace scrambletop;

namespace {

constexpr double pi = std::numbers::pi;

ComplexVector vec_row_major(const ComplexMatrix& a) {
    ComplexVector v(a.size());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
    }
    return v;
}

ComplexMatrix random_density(Eigen::Index d, CounterRng& rng) {
    const ComplexMatrix a = random_complex(d, d, rng);
    const ComplexMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

QuantumParams params(int twice_j) {
    QuantumParams p;
    p.j = SpinNumber::from_twice(twice_j);
    return p;
}

ComplexMatrix pure(const ComplexVector& psi) { return psi * psi.adjoint(); }

LindbladModel static_model(const ComplexMatrix& h, std::vector<JumpOperator> jumps) {
    LindbladModel m = LindbladModel::closed(h);
    m.jumps = std::move(jumps);
    return m;
}

OtocConfig config(double theta, double phi, double eps, std::vector<double> times) {
    OtocConfig cfg;
    cfg.theta = theta;
    cfg.phi = phi;
    cfg.epsilon = eps;
    cfg.times = std::move(times);
    return cfg;
}

}  // namespace

TEST(Superoperator, VanishesWithoutHamiltonianOrJumps) {
    const LindbladModel m = LindbladModel::closed(ComplexMatrix::Zero(3, 3));
    EXPECT_EQ(max_abs(build_superoperator(m, 0.0)), 0.0);
}

TEST(Superoperator, MatchesMatrixRightHandSide) {
    CounterRng rng(51, 0);
    const QuantumParams p = params(3);
    const SpinSystem sys = make_spin<double>(p.j);
    const LindbladModel m = LindbladModel::driven_top(
        p, sys, {{sys.jz, 0.3}, {ComplexMatrix(sys.jx - cplx(0, 1) * sys.jy), 0.2}});
    for (double t : {0.0, 1.3}) {
        const ComplexMatrix rho = random_complex(4, 4, rng);
        const ComplexVector lhs = build_superoperator(m, t) * vec_row_major(rho);
        EXPECT_LT((lhs - vec_row_major(lindblad_rhs(m, rho, t))).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(Superoperator, PreservesTrace) {
    CounterRng rng(52, 0);
    const QuantumParams p = params(7);
    const SpinSystem sys = make_spin<double>(p.j);
    const LindbladModel m = LindbladModel::driven_top(p, sys, {{sys.jz, 0.1}, {sys.jx, 0.4}});
    for (int k = 0; k < 5; ++k) {
        const ComplexMatrix rho = random_density(8, rng);
        EXPECT_LT(std::abs(lindblad_rhs(m, rho, 0.7 * k).trace()), 1e-12);
    }
    const ComplexMatrix s = build_superoperator(m, 0.4);
    const ComplexVector id = vec_row_major(ComplexMatrix::Identity(8, 8));
    EXPECT_LT((id.adjoint() * s).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LindbladModel, ValidationErrors) {
    const SpinSystem sys = make_spin<double>(1.5);
    EXPECT_THROW(static_model(sys.jx, {{sys.jz, -0.1}}).validate(), std::invalid_argument);
    EXPECT_THROW(build_superoperator(static_model(sys.jx, {{sys.jz, -0.1}}), 0.0), std::invalid_argument);
    EXPECT_THROW(static_model(sys.jx, {{ComplexMatrix::Identity(3, 3), 0.1}}).validate(), std::invalid_argument);
    ComplexMatrix h = sys.jx;
    h(0, 1) += 0.5;
    EXPECT_THROW(LindbladModel::closed(h).validate(), std::invalid_argument);
    EXPECT_THROW(dephasing_model(params(3), make_spin<double>(2.5), 0.1), std::invalid_argument);
}

TEST(EvolveDensity, DephasingClosedForm) {
    for (int twice_j : {1, 3}) {
        const SpinSystem sys = make_spin<double>(SpinNumber::from_twice(twice_j));
        const double gamma = 0.7, t = 2.0;
        const LindbladModel m = static_model(ComplexMatrix::Zero(sys.dimension(), sys.dimension()), {{sys.jz, gamma}});
        const ComplexMatrix rho0 = pure(scs(sys, 1.2, 0.4).amplitudes);
        const ComplexMatrix rho = evolve_density(rho0, m, t);
        for (Eigen::Index a = 0; a < sys.dimension(); ++a) {
            for (Eigen::Index b = 0; b < sys.dimension(); ++b) {
                const double dm = sys.j.m_of_row(a) - sys.j.m_of_row(b);
                const cplx expected = rho0(a, b) * std::exp(-0.5 * gamma * dm * dm * t);
                EXPECT_LT(std::abs(rho(a, b) - expected), 1e-9) << a << "," << b;
            }
        }
    }
}

TEST(EvolveDensity, CommutingDephasingKeepsPopulations) {
    const SpinSystem sys = make_spin<double>(3.5);
    const LindbladModel m = static_model(sys.jz, {{sys.jz, 0.5}});
    const ComplexMatrix rho0 = pure(scs(sys, 0.9, 1.1).amplitudes);
    const ComplexMatrix rho = evolve_density(rho0, m, 3.0);
    EXPECT_LT((rho.diagonal() - rho0.diagonal()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EvolveDensity, StrongDephasingKillsCoherences) {
    const SpinSystem sys = make_spin<double>(1.5);
    const LindbladModel m = static_model(ComplexMatrix(0.2 * sys.jz), {{sys.jz, 60.0}});
    const ComplexMatrix rho = evolve_density(pure(scs(sys, pi / 2, 0.0).amplitudes), m, 1.0);
    const ComplexMatrix offdiag = rho - ComplexMatrix(rho.diagonal().asDiagonal());
    EXPECT_LT(max_abs(offdiag), 1e-8);
}

TEST(EvolveDensity, TraceAndHermiticityOverHundredPeriods) {
    const QuantumParams p = params(3);
    const SpinSystem sys = make_spin<double>(p.j);
    const LindbladModel m = dephasing_model(p, sys, 0.05);
    std::vector<double> times;
    for (int k = 0; k <= 100; k += 10) times.push_back(k * p.tau());
    const std::vector<ComplexMatrix> traj = density_trajectory(pure(scs(sys, 0.6 * pi, 0.0).amplitudes), m, times);
    for (const ComplexMatrix& rho : traj) {
        EXPECT_LT(std::abs(rho.trace() - 1.0), 1e-10);
        EXPECT_LT(hermiticity_error(rho), 1e-9);
        EXPECT_GE(hermitian_eig(ComplexMatrix(0.5 * (rho + rho.adjoint()))).eigenvalues.minCoeff(), -1e-8);
    }
}

TEST(EvolveDensity, DampingRelaxesTowardLowestWeightState) {
    const SpinSystem sys = make_spin<double>(1.0);
    const LindbladModel m = static_model(ComplexMatrix::Zero(3, 3), {{ComplexMatrix(sys.jx - cplx(0, 1) * sys.jy), 1.0}});
    const ComplexMatrix rho = evolve_density(pure(scs(sys, 0.0, 0.0).amplitudes), m, 30.0);
    EXPECT_NEAR(rho(2, 2).real(), 1.0, 1e-9);
}

TEST(EvolveDensity, ClosedLimitMatchesUnitaryEvolution) {
    CounterRng rng(53, 0);
    const ComplexMatrix h = random_hermitian(5, rng);
    const ComplexVector psi = random_state(5, rng);
    const LindbladModel m = LindbladModel::closed(h);
    const ComplexVector expected = expm_i_hermitian(h, 3.0) * psi;
    EXPECT_LT(max_abs(evolve_density(pure(psi), m, 3.0) - pure(expected)), 1e-8);
}

TEST(EvolveDensity, ZeroRateDrivenTopMatchesFloquetEvolution) {
    const QuantumParams p = params(3);
    const SpinSystem sys = make_spin<double>(p.j);
    FloquetOptions fo;
    fo.segments = 16000;
    fo.certify = false;
    const FloquetOperator f = floquet_operator(p, sys, fo);
    const ComplexVector psi = scs(sys, 0.6 * pi, 0.0).amplitudes;
    const LindbladModel m = dephasing_model(p, sys, 0.0);
    for (double periods : {1.0, 4.5}) {
        const double t = periods * p.tau();
        const ComplexVector expected = evolve(psi, t, f, p, sys);
        EXPECT_LT(max_abs(evolve_density(pure(psi), m, t) - pure(expected)), 1e-8);
    }
}

TEST(EvolveDensity, RejectsInvalidStates) {
    const SpinSystem sys = make_spin<double>(0.5);
    const LindbladModel m = LindbladModel::closed(sys.jx);
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    EXPECT_THROW(evolve_density(bad, m, 1.0), std::invalid_argument);
    bad << 1.5, 0, 0, -0.5;
    EXPECT_THROW(evolve_density(bad, m, 1.0), std::invalid_argument);
    bad << 0.5, 0.2, 0.0, 0.5;
    EXPECT_THROW(evolve_density(bad, m, 1.0), std::invalid_argument);
    EXPECT_THROW(evolve_density(ComplexMatrix::Identity(3, 3) / 3.0, m, 1.0), std::invalid_argument);
    EXPECT_THROW(evolve_density(ComplexMatrix::Identity(2, 2) / 2.0, m, 1.0, DensityOptions{0.0}),
                 std::invalid_argument);
    EXPECT_THROW(density_trajectory(ComplexMatrix::Identity(2, 2) / 2.0, m, {2.0, 1.0}), std::invalid_argument);
}

TEST(OpenOtoc, ZeroCouplingMatchesClosedOtoc) {
    const QuantumParams p = params(3);
    const SpinSystem sys = make_spin<double>(p.j);
    FloquetOptions fo;
    fo.segments = 16000;
    fo.certify = false;
    const FloquetOperator f = floquet_operator(p, sys, fo);
    const OtocConfig cfg = config(0.6 * pi, 0.0, pi / 8, {0, 1, 3, 6});
    const ComplexMatrix rho0 = pure(scs(sys, cfg.theta, cfg.phi).amplitudes);
    const std::vector<double> open = otoc_open_approx(rho0, cfg, sys, dephasing_model(p, sys, 0.0));
    const OtocResult closed = otoc_pure(cfg, p, sys, f);
    for (std::size_t k = 0; k < open.size(); ++k) EXPECT_NEAR(open[k], closed.F[k], 1e-8);
}

TEST(OpenOtoc, IdentityWGivesUnity) {
    const QuantumParams p = params(3);
    const SpinSystem sys = make_spin<double>(p.j);
    const OtocConfig cfg = config(0.6 * pi, 0.0, 0.0, {0, 2, 5});
    const ComplexMatrix rho0 = pure(scs(sys, cfg.theta, cfg.phi).amplitudes);
    for (double f : otoc_open_approx(rho0, cfg, sys, dephasing_model(p, sys, 0.2))) EXPECT_NEAR(f, 1.0, 1e-10);
}

TEST(OpenOtoc, DeviationGrowsWithDephasingRate) {
    const QuantumParams p = params(7);
    const SpinSystem sys = make_spin<double>(p.j);
    const OtocConfig cfg = config(0.6 * pi, 0.0, pi / 8, {5});
    const ComplexMatrix rho0 = pure(scs(sys, cfg.theta, cfg.phi).amplitudes);
    const double closed = otoc_open_approx(rho0, cfg, sys, dephasing_model(p, sys, 0.0))[0];
    double previous = 0.0;
    for (double gamma : {1e-4, 1e-3, 1e-2}) {
        const double f = otoc_open_approx(rho0, cfg, sys, dephasing_model(p, sys, gamma * p.alpha))[0];
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0 + 1e-10);
        const double deviation = std::abs(f - closed);
        EXPECT_GT(deviation, previous) << "gamma " << gamma;
        previous = deviation;
    }
}

TEST(OpenOtoc, RequiresPureInitialState) {
    const QuantumParams p = params(1);
    const SpinSystem sys = make_spin<double>(p.j);
    EXPECT_THROW(otoc_open_approx(ComplexMatrix::Identity(2, 2) / 2.0, config(0, 0, 0.1, {1}), sys,
                                  dephasing_model(p, sys, 0.1)),
                 std::invalid_argument);
}

TEST(Doubled, ExactAtTimeZero) {
    const QuantumParams p = params(3);
    const SpinSystem sys = make_spin<double>(p.j);
    const ComplexMatrix rho0 = pure(scs(sys, 0.6 * pi, 0.0).amplitudes);
    EXPECT_EQ(doubled_evolution_check(rho0, dephasing_model(p, sys, 0.1), 0.0), 0.0);
}

TEST(Doubled, SpinHalfDephasing) {
    const QuantumParams p = params(1);
    const SpinSystem sys = make_spin<double>(p.j);
    const ComplexMatrix rho0 = pure(scs(sys, 1.0, 0.5).amplitudes);
    EXPECT_LT(doubled_evolution_check(rho0, dephasing_model(p, sys, 0.1), 10 * p.tau()), 1e-9);
}

TEST(Doubled, DrivenSpinThreeHalvesWithDephasingAndDamping) {
    const QuantumParams p = params(3);
    const SpinSystem sys = make_spin<double>(p.j);
    const ComplexMatrix rho0 = pure(scs(sys, 0.6 * pi, 0.0).amplitudes);
    EXPECT_LT(doubled_evolution_check(rho0, dephasing_model(p, sys, 0.05), 20 * p.tau()), 1e-8);
    EXPECT_LT(doubled_evolution_check(rho0, damping_model(p, sys, 0.05), 5 * p.tau()), 1e-8);
}

TEST(Doubled, RefusesLargeDimension) {
    const QuantumParams p = params(17);
    const SpinSystem sys = make_spin<double>(p.j);
    const ComplexMatrix rho0 = pure(scs(sys, 0.0, 0.0).amplitudes);
    EXPECT_THROW(doubled_evolution_check(rho0, dephasing_model(p, sys, 0.1), 1.0), std::invalid_argument);
}
