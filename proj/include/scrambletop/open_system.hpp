// open_system.hpp: Lindblad evolution and the product-of-expectations OTOC F̃(t)
//
// ρ̇ = −i[H(t), ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
//
// Vectorization is row-major, index i·d + j ↔ ρ_ij, so vec(AρB) = (A ⊗ Bᵀ) vec(ρ).

#pragma once

#include "scrambletop/floquet.hpp"
#include "scrambletop/numerics.hpp"
#include "scrambletop/otoc.hpp"
#include "scrambletop/spin.hpp"

#include <functional>
#include <vector>

namespace scrambletop {

struct JumpOperator {
    ComplexMatrix op;
    double rate = 0.0;
};

struct LindbladModel {
    std::function<ComplexMatrix(double)> hamiltonian;
    std::vector<JumpOperator> jumps;
    Eigen::Index dimension = 0;
    // τ for the driven top; scales OtocConfig times
    double time_unit = 1.0;

    static LindbladModel closed(const ComplexMatrix& h, double time_unit = 1.0);
    static LindbladModel driven_top(const QuantumParams& p, const SpinSystem& sys,
                                    std::vector<JumpOperator> jumps = {});

    void validate() const;
};

// L = J_z at rate γ.
LindbladModel dephasing_model(const QuantumParams& p, const SpinSystem& sys, double rate);
// L = J_− at rate γ.
LindbladModel damping_model(const QuantumParams& p, const SpinSystem& sys, double rate);

// d² × d² generator M(t) with vec(ρ̇) = M vec(ρ).
ComplexMatrix build_superoperator(const LindbladModel& m, double t);

// Right-hand side of the master equation in matrix form.
ComplexMatrix lindblad_rhs(const LindbladModel& m, const ComplexMatrix& rho, double t);

struct DensityOptions {
    // RK4 step h is chosen with h·Λ ≤ step_scale, Λ bounding the generator norm
    double step_scale = 0.01;
};

ComplexMatrix evolve_density(const ComplexMatrix& rho0, const LindbladModel& m, double t,
                             const DensityOptions& opt = {});

// ρ at nondecreasing absolute times, integrating exactly to each.
std::vector<ComplexMatrix> density_trajectory(const ComplexMatrix& rho0, const LindbladModel& m,
                                              const std::vector<double>& times,
                                              const DensityOptions& opt = {});

// F̃(t) = |Tr[ρ(t) W]|² through the W-eigenbasis population readout, with ρ₀ pure and
// W = W_ε(θ, φ) from cfg. Times in units of m.time_unit.
std::vector<double> otoc_open_approx(const ComplexMatrix& rho0, const OtocConfig& cfg,
                                     const SpinSystem& sys, const LindbladModel& m,
                                     const DensityOptions& opt = {});

// Evolves ρ̃_{ij,mn} under two copies of M and returns max|ρ̃_{ij,mn}(t) − ρ_ij(t)ρ_mn(t)|.
double doubled_evolution_check(const ComplexMatrix& rho0, const LindbladModel& m, double t,
                               const DensityOptions& opt = {});

}  // namespace scrambletop
