// floquet.hpp: one-period propagator of the quantum driven top
//
// H(t) = α J_z + (β/J) J_x² + γ cos(ωt) J_y, τ = 2π/ω. The Floquet operator is the
// time-ordered product of N midpoint segment exponentials, later times leftmost.

#pragma once

#include "scrambletop/classical_top.hpp"
#include "scrambletop/numerics.hpp"
#include "scrambletop/spin.hpp"

#include <Eigen/Dense>

namespace scrambletop {

struct QuantumParams {
    double alpha = 1.0;
    double beta = 1.5;
    double gamma = 0.05;
    double omega = 1.5;
    SpinNumber j = SpinNumber::from_twice(41);

    double tau() const;
    void validate() const;
    classical::ClassicalParams classical() const { return {alpha, beta, gamma, omega}; }
};

ComplexMatrix hamiltonian(double t, const QuantumParams& p, const SpinSystem& sys);

struct FloquetOptions {
    int segments = 2000;
    int max_segments = 16000;
    double convergence_target = 1e-6;
    // Compare against 2N segments (doubling N up to max_segments until the gap is met).
    bool certify = true;
};

struct FloquetOperator {
    ComplexMatrix unitary;
    int segments = 0;
    double tau = 0.0;
    // max|U(N) − U(2N)| from certification; negative when not certified
    double convergence_gap = -1.0;
    // eigenvalues are φ_i = ω_i τ ∈ (−π, π], U v_i = exp(−iφ_i) v_i
    EigenSystem<double> spectrum;
    // smallest separation between eigenphases on the circle
    double min_phase_gap = 0.0;

    Eigen::Index dimension() const { return unitary.rows(); }
    // Pseudoeigenfrequencies ω_i = φ_i / τ.
    RealVector quasienergies() const { return spectrum.eigenvalues / tau; }
    bool has_degenerate_phases() const { return min_phase_gap < 1e-10; }
};

// N-segment midpoint product (no certification).
ComplexMatrix segment_product(const QuantumParams& p, const SpinSystem& sys, int segments,
                              int first = 0, int count = -1);

FloquetOperator floquet_operator(const QuantumParams& p, const SpinSystem& sys,
                                 const FloquetOptions& opt = {});

// t = whole·τ + partial·τ/N with partial ∈ [0, N), rounding to the nearest segment.
struct PeriodSplit {
    long whole = 0;
    int partial = 0;
};

PeriodSplit split_time(double t, const FloquetOperator& f);

// State at time t (absolute time, not periods): whole periods by repeated U_F, the
// remainder by the leading ⌊rN/τ⌉ segments of the period.
ComplexVector evolve(const ComplexVector& state, double t, const FloquetOperator& f,
                     const QuantumParams& p, const SpinSystem& sys);

struct ParticipationRatio {
    double value = 0.0;
    // true when degenerate Floquet phases make the eigenbasis (and so PR) basis dependent
    bool basis_dependent = false;
};

ParticipationRatio participation_ratio(const ComplexVector& state, const FloquetOperator& f);

// PR of scs(θ, φ) per grid cell (rows θ, columns φ).
Eigen::MatrixXd pr_map(const classical::Grid& grid, const FloquetOperator& f, const SpinSystem& sys,
                       int threads = 1);

}  // namespace scrambletop
