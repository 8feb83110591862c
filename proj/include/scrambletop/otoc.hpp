// otoc.hpp: forward-only OTOC evaluation and its brute-force oracles
//
// For V = |Ψ₀⟩⟨Ψ₀| and unitary W with eigenvalues μ_m, F(t) = |⟨W(t)⟩|² and
// ⟨W(t)⟩ = Σ_m |c_m(t)|² μ_m, where c_m(t) are the amplitudes of the forward-evolved
// state in the eigenbasis of W. Only populations enter, so one stored set serves
// every ε. Mixed states and general V are reduced to expectation values of W(t) in
// superposition states.

#pragma once

#include "scrambletop/floquet.hpp"
#include "scrambletop/numerics.hpp"
#include "scrambletop/spin.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace scrambletop {

// Propagator source: a time-independent Hamiltonian or a Floquet operator (stroboscopic
// with partial-period segments). All times here are absolute.
class Evolution {
public:
    static Evolution from_hamiltonian(const ComplexMatrix& h, double time_unit = 1.0);
    static Evolution from_floquet(const FloquetOperator& f, const QuantumParams& p,
                                  const SpinSystem& sys);

    Eigen::Index dimension() const { return dimension_; }
    // τ for Floquet evolution; OtocConfig times are multiples of this.
    double time_unit() const { return time_unit_; }

    ComplexMatrix propagator(double t) const;
    ComplexVector apply(const ComplexVector& psi, double t) const;
    // States at nondecreasing times, advancing incrementally.
    std::vector<ComplexVector> trajectory(const ComplexVector& psi0, const std::vector<double>& times) const;

private:
    Evolution() = default;

    Eigen::Index dimension_ = 0;
    double time_unit_ = 1.0;
    std::optional<EigenSystem<double>> hamiltonian_;
    std::optional<FloquetOperator> floquet_;
    std::optional<QuantumParams> params_;
    std::optional<SpinSystem> system_;
};

// A unitary W read out through its eigenbasis: ⟨ψ|W|ψ⟩ = Σ_m |⟨w_m|ψ⟩|² μ_m.
struct MeasuredUnitary {
    ComplexMatrix eigenvectors;
    ComplexVector eigenvalues;

    static MeasuredUnitary from_rotation(const AxisRotation& w);
    static MeasuredUnitary from_matrix(const ComplexMatrix& w);

    Eigen::Index dimension() const { return eigenvectors.rows(); }
    ComplexMatrix matrix() const;
    RealVector populations(const ComplexVector& psi) const;
    cplx expectation(const RealVector& populations) const;
};

struct OtocConfig {
    double theta = 0.0;
    double phi = 0.0;
    double epsilon = 0.0;
    // in units of the evolution's time_unit; nonnegative and strictly increasing
    std::vector<double> times;
    // per-time measurement count; absent means exact populations
    std::optional<long> shots;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct OtocResult {
    std::vector<double> times;
    std::vector<double> F;
    std::vector<double> C;
    std::vector<cplx> expectation_W;
    std::vector<RealVector> populations;
    std::optional<long> shots;
    std::uint64_t rng_seed = 0;
};

// Populations of scs(θ, φ) evolved to each configured time, in the eigenbasis R(θ,φ)|J,m⟩.
// Shots mode replaces each vector with multinomial frequencies drawn from stream k = time
// index of the seeded generator.
std::vector<RealVector> otoc_populations(const OtocConfig& cfg, const SpinSystem& sys,
                                         const Evolution& evolution);

// ⟨W⟩ = Σ_m P_m e^{−imε} for each stored population vector.
OtocResult otoc_from_populations(const std::vector<double>& times,
                                 const std::vector<RealVector>& populations, SpinNumber j,
                                 double epsilon);

OtocResult otoc_pure(const OtocConfig& cfg, const SpinSystem& sys, const Evolution& evolution);
OtocResult otoc_pure(const OtocConfig& cfg, const QuantumParams& p, const SpinSystem& sys,
                     const FloquetOperator& f);

// Tr[ρ₀ W†(t) V† W(t) V] with W(t) = U†(t) W U(t) built explicitly.
cplx otoc_trace_oracle(const ComplexMatrix& rho0, const ComplexMatrix& v, const ComplexMatrix& w,
                       double t, const Evolution& evolution);

// Tr[ρ₀ W(t) ρ₀ W†(t)] for pure ρ₀.
double loschmidt_fidelity(const ComplexMatrix& rho0, const ComplexMatrix& w, double t,
                          const Evolution& evolution);

// Tr[ρ₀ [W(t), V]† [W(t), V]].
double scrambling_commutator(const ComplexMatrix& rho0, const ComplexMatrix& v, const ComplexMatrix& w,
                             double t, const Evolution& evolution);

struct PolarizationStates {
    ComplexVector a_plus, a_minus, b_plus, b_minus;
};

// a± = (n ± m)/√2, b± = (n ± i m)/√2 for orthonormal n, m.
PolarizationStates polarization_states(const ComplexVector& n, const ComplexVector& m);

// ⟨m|W|n⟩ from the four expectation values
// 2⟨m|W|n⟩ = ⟨a+⟩ − ⟨a−⟩ + i⟨b+⟩ − i⟨b−⟩, with `expect(χ)` returning ⟨χ|W|χ⟩.
template <typename Expect>
cplx polarization_element(const ComplexVector& n, const ComplexVector& m, Expect&& expect) {
    const PolarizationStates s = polarization_states(n, m);
    const cplx i(0.0, 1.0);
    return 0.5 * (expect(s.a_plus) - expect(s.a_minus) + i * expect(s.b_plus) - i * expect(s.b_minus));
}

cplx polarization_element(const ComplexVector& n, const ComplexVector& m, const ComplexMatrix& w_heis);

// Expectation values ⟨χ|W(t)|χ⟩ obtained the experimental way: evolve χ forward to t
// and weight its W-eigenbasis populations by μ_m. Counts every evaluation.
class ProtocolMeasurement {
public:
    ProtocolMeasurement(const MeasuredUnitary& w, const Evolution& evolution, double t);

    cplx operator()(const ComplexVector& chi);
    long count() const { return count_; }

private:
    const MeasuredUnitary& w_;
    ComplexMatrix u_;
    long count_ = 0;
};

// ρ₀ = Σ p_n |Ψ_n⟩⟨Ψ_n| with orthonormal basis columns.
struct MixedState {
    RealVector weights;
    ComplexMatrix basis;

    void validate() const;
    Eigen::Index rank() const { return weights.size(); }
    ComplexMatrix density() const;
};

// A_ki = ⟨Ψ_k|W(t)|Ψ_i⟩ over the basis, from one expectation value per diagonal element
// and four per unordered pair (2r² − r in total).
ComplexMatrix heisenberg_elements(const ComplexMatrix& basis, ProtocolMeasurement& measure);

// Σ_{m,n} p_n² p_m |⟨Ψ_m|W(t)|Ψ_n⟩|² (raw weights, so F(0) = Σ p_n³).
double otoc_mixed(const MixedState& ms, const MeasuredUnitary& w, double t, const Evolution& evolution);
std::vector<double> otoc_mixed(const MixedState& ms, const OtocConfig& cfg, const SpinSystem& sys,
                               const Evolution& evolution);

struct GeneralVResult {
    cplx value;
    long expectation_values = 0;
};

// Σ v_ij v*_kl p_j ⟨Ψ_j|W†(t)|Ψ_l⟩⟨Ψ_k|W(t)|Ψ_i⟩ for V = Σ v_ij |Ψ_i⟩⟨Ψ_j|.
GeneralVResult otoc_general_v(const MixedState& ms, const ComplexMatrix& v, const MeasuredUnitary& w,
                              double t, const Evolution& evolution);

// C(t) = 1 − F(t).
std::vector<double> scrambling_series(const OtocResult& result);

// Var(n·J) from populations in the eigenbasis of n·J (row k ↔ m = J − k).
double population_variance(const RealVector& populations, SpinNumber j);

struct VarianceCheck {
    std::vector<double> times;
    // Var(n(θ,φ)·J) in the evolved state
    std::vector<double> variance;
    std::vector<double> c_over_eps2;

    // max_t |C/ε² − σ²| / max_t σ²
    double max_relative_deviation() const;
};

VarianceCheck variance_check(const OtocConfig& cfg, const SpinSystem& sys, const Evolution& evolution);

}  // namespace scrambletop
