#include "scrambletop/otoc.hpp"

#include "scrambletop/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scrambletop {

namespace {

ComplexMatrix matrix_power(const ComplexMatrix& u, long n) {
    ComplexMatrix result = ComplexMatrix::Identity(u.rows(), u.cols());
    ComplexMatrix base = u;
    while (n > 0) {
        if (n & 1) result = base * result;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

void check_square(const ComplexMatrix& a, Eigen::Index d, const char* what) {
    if (a.rows() != d || a.cols() != d) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

cplx trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.transpose().cwiseProduct(b)).sum();
}

void check_normalized(const ComplexVector& psi, const char* who) {
    const double drift = std::abs(psi.squaredNorm() - 1.0);
    if (drift > 1e-6) throw NumericalError(std::string(who) + ": evolved state lost normalization", drift);
}

}  // namespace

Evolution Evolution::from_hamiltonian(const ComplexMatrix& h, double time_unit) {
    if (!(time_unit > 0.0)) throw std::invalid_argument("Evolution: time unit must be positive");
    Evolution e;
    e.dimension_ = h.rows();
    e.time_unit_ = time_unit;
    e.hamiltonian_ = hermitian_eig(h);
    return e;
}

Evolution Evolution::from_floquet(const FloquetOperator& f, const QuantumParams& p, const SpinSystem& sys) {
    if (f.dimension() != sys.dimension()) throw std::invalid_argument("Evolution: dimension mismatch");
    Evolution e;
    e.dimension_ = f.dimension();
    e.time_unit_ = f.tau;
    e.floquet_ = f;
    e.params_ = p;
    e.system_ = sys;
    return e;
}

ComplexMatrix Evolution::propagator(double t) const {
    if (hamiltonian_) {
        if (!(t >= 0.0)) throw std::invalid_argument("propagator: time must be nonnegative");
        return spectral_function(*hamiltonian_, [t](double lambda) { return std::polar(1.0, -lambda * t); });
    }
    const PeriodSplit split = split_time(t, *floquet_);
    ComplexMatrix u = matrix_power(floquet_->unitary, split.whole);
    if (split.partial > 0) u = segment_product(*params_, *system_, floquet_->segments, 0, split.partial) * u;
    return u;
}

ComplexVector Evolution::apply(const ComplexVector& psi, double t) const {
    if (psi.size() != dimension_) throw std::invalid_argument("apply: state dimension mismatch");
    if (hamiltonian_) return propagator(t) * psi;
    return evolve(psi, t, *floquet_, *params_, *system_);
}

std::vector<ComplexVector> Evolution::trajectory(const ComplexVector& psi0,
                                                 const std::vector<double>& times) const {
    if (psi0.size() != dimension_) throw std::invalid_argument("trajectory: state dimension mismatch");
    std::vector<ComplexVector> out;
    out.reserve(times.size());
    if (hamiltonian_) {
        for (double t : times) out.push_back(propagator(t) * psi0);
        return out;
    }
    ComplexVector stroboscopic = psi0;
    long done = 0;
    for (double t : times) {
        const PeriodSplit split = split_time(t, *floquet_);
        if (split.whole < done) throw std::invalid_argument("trajectory: times must be nondecreasing");
        for (; done < split.whole; ++done) stroboscopic = floquet_->unitary * stroboscopic;
        if (split.partial > 0) {
            out.push_back(segment_product(*params_, *system_, floquet_->segments, 0, split.partial) *
                          stroboscopic);
        } else {
            out.push_back(stroboscopic);
        }
    }
    return out;
}

MeasuredUnitary MeasuredUnitary::from_rotation(const AxisRotation& w) { return {w.eigenvectors, w.eigenvalues}; }

MeasuredUnitary MeasuredUnitary::from_matrix(const ComplexMatrix& w) {
    const EigenSystem<double> es = unitary_eig(w);
    ComplexVector mu(es.size());
    for (Eigen::Index k = 0; k < mu.size(); ++k) mu(k) = std::polar(1.0, -es.eigenvalues(k));
    return {es.eigenvectors, mu};
}

ComplexMatrix MeasuredUnitary::matrix() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

RealVector MeasuredUnitary::populations(const ComplexVector& psi) const {
    return (eigenvectors.adjoint() * psi).cwiseAbs2();
}

cplx MeasuredUnitary::expectation(const RealVector& populations) const {
    return (populations.cast<cplx>().array() * eigenvalues.array()).sum();
}

void OtocConfig::validate() const {
    if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("OtocConfig: angles must be finite");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0)) throw std::invalid_argument("OtocConfig: times must be nonnegative");
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw std::invalid_argument("OtocConfig: times must be strictly increasing");
        }
    }
    if (shots && *shots < 1) throw std::invalid_argument("OtocConfig: shots must be at least 1");
}

std::vector<RealVector> otoc_populations(const OtocConfig& cfg, const SpinSystem& sys,
                                         const Evolution& evolution) {
    cfg.validate();
    if (evolution.dimension() != sys.dimension()) {
        throw std::invalid_argument("otoc_populations: evolution and spin dimensions differ");
    }
    const ComplexMatrix r = rotation(sys, cfg.theta, cfg.phi);
    const ComplexVector psi0 = r.col(0);
    std::vector<double> absolute(cfg.times.size());
    for (std::size_t k = 0; k < absolute.size(); ++k) absolute[k] = cfg.times[k] * evolution.time_unit();
    const std::vector<ComplexVector> states = evolution.trajectory(psi0, absolute);

    std::vector<RealVector> populations;
    populations.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        check_normalized(states[k], "otoc_pure");
        RealVector pop = (r.adjoint() * states[k]).cwiseAbs2();
        if (cfg.shots) {
            CounterRng rng(cfg.rng_seed, k);
            const std::vector<long> counts =
                sample_counts(std::vector<double>(pop.data(), pop.data() + pop.size()), *cfg.shots, rng);
            for (Eigen::Index m = 0; m < pop.size(); ++m) {
                pop(m) = static_cast<double>(counts[m]) / static_cast<double>(*cfg.shots);
            }
        }
        populations.push_back(std::move(pop));
    }
    return populations;
}

OtocResult otoc_from_populations(const std::vector<double>& times,
                                 const std::vector<RealVector>& populations, SpinNumber j,
                                 double epsilon) {
    if (times.size() != populations.size()) {
        throw std::invalid_argument("otoc_from_populations: one population vector per time required");
    }
    const ComplexVector mu = rotation_eigenvalues(j, epsilon);
    OtocResult res;
    res.times = times;
    res.populations = populations;
    for (const RealVector& pop : populations) {
        if (pop.size() != mu.size()) throw std::invalid_argument("otoc_from_populations: dimension mismatch");
        const cplx w = (pop.cast<cplx>().array() * mu.array()).sum();
        res.expectation_W.push_back(w);
        res.F.push_back(std::norm(w));
        res.C.push_back(1.0 - std::norm(w));
    }
    return res;
}

OtocResult otoc_pure(const OtocConfig& cfg, const SpinSystem& sys, const Evolution& evolution) {
    OtocResult res = otoc_from_populations(cfg.times, otoc_populations(cfg, sys, evolution), sys.j, cfg.epsilon);
    res.shots = cfg.shots;
    res.rng_seed = cfg.rng_seed;
    return res;
}

OtocResult otoc_pure(const OtocConfig& cfg, const QuantumParams& p, const SpinSystem& sys,
                     const FloquetOperator& f) {
    return otoc_pure(cfg, sys, Evolution::from_floquet(f, p, sys));
}

cplx otoc_trace_oracle(const ComplexMatrix& rho0, const ComplexMatrix& v, const ComplexMatrix& w,
                       double t, const Evolution& evolution) {
    const Eigen::Index d = evolution.dimension();
    check_square(rho0, d, "otoc_trace_oracle");
    check_square(v, d, "otoc_trace_oracle");
    check_square(w, d, "otoc_trace_oracle");
    if (std::abs(rho0.trace() - 1.0) > 1e-10) throw std::invalid_argument("otoc_trace_oracle: Tr ρ₀ must be 1");
    const ComplexMatrix u = evolution.propagator(t);
    const ComplexMatrix wt = u.adjoint() * w * u;
    const ComplexMatrix chain = wt.adjoint() * v.adjoint() * wt * v;
    return trace_product(rho0, chain);
}

double loschmidt_fidelity(const ComplexMatrix& rho0, const ComplexMatrix& w, double t,
                          const Evolution& evolution) {
    const Eigen::Index d = evolution.dimension();
    check_square(rho0, d, "loschmidt_fidelity");
    check_square(w, d, "loschmidt_fidelity");
    const double purity = trace_product(rho0, rho0).real();
    if (std::abs(rho0.trace() - 1.0) > 1e-10 || std::abs(purity - 1.0) > 1e-10) {
        throw std::invalid_argument("loschmidt_fidelity: ρ₀ must be a pure state");
    }
    const ComplexMatrix u = evolution.propagator(t);
    const ComplexMatrix wt = u.adjoint() * w * u;
    const ComplexMatrix rho_w = wt * rho0 * wt.adjoint();
    return trace_product(rho0, rho_w).real();
}

double scrambling_commutator(const ComplexMatrix& rho0, const ComplexMatrix& v, const ComplexMatrix& w,
                             double t, const Evolution& evolution) {
    const Eigen::Index d = evolution.dimension();
    check_square(rho0, d, "scrambling_commutator");
    check_square(v, d, "scrambling_commutator");
    check_square(w, d, "scrambling_commutator");
    const ComplexMatrix u = evolution.propagator(t);
    const ComplexMatrix wt = u.adjoint() * w * u;
    const ComplexMatrix comm = wt * v - v * wt;
    return trace_product(rho0, comm.adjoint() * comm).real();
}

PolarizationStates polarization_states(const ComplexVector& n, const ComplexVector& m) {
    if (n.size() != m.size()) throw std::invalid_argument("polarization: state dimensions differ");
    if (std::abs(n.squaredNorm() - 1.0) > 1e-10 || std::abs(m.squaredNorm() - 1.0) > 1e-10) {
        throw std::invalid_argument("polarization: states must be normalized");
    }
    if (std::abs(n.dot(m)) > 1e-10) throw std::invalid_argument("polarization: states must be orthogonal");
    const double s = std::numbers::sqrt2 / 2.0;
    const cplx i(0.0, 1.0);
    return {s * (n + m), s * (n - m), s * (n + i * m), s * (n - i * m)};
}

cplx polarization_element(const ComplexVector& n, const ComplexVector& m, const ComplexMatrix& w_heis) {
    check_square(w_heis, n.size(), "polarization_element");
    return polarization_element(n, m, [&](const ComplexVector& chi) { return chi.dot(w_heis * chi); });
}

ProtocolMeasurement::ProtocolMeasurement(const MeasuredUnitary& w, const Evolution& evolution, double t)
    : w_(w), u_(evolution.propagator(t)) {
    if (w.dimension() != evolution.dimension()) {
        throw std::invalid_argument("ProtocolMeasurement: dimension mismatch");
    }
}

cplx ProtocolMeasurement::operator()(const ComplexVector& chi) {
    ++count_;
    const ComplexVector evolved = u_ * chi;
    check_normalized(evolved, "ProtocolMeasurement");
    return w_.expectation(w_.populations(evolved));
}

void MixedState::validate() const {
    if (basis.cols() != weights.size() || weights.size() == 0) {
        throw std::invalid_argument("MixedState: need one basis column per weight");
    }
    if (std::abs(weights.sum() - 1.0) > 1e-12) throw std::invalid_argument("MixedState: weights must sum to 1");
    if ((weights.array() < 0.0).any() || (weights.array() > 1.0).any()) {
        throw std::invalid_argument("MixedState: weights must lie in [0, 1]");
    }
    const Eigen::Index r = weights.size();
    if (max_abs(basis.adjoint() * basis - ComplexMatrix::Identity(r, r)) > 1e-10) {
        throw std::invalid_argument("MixedState: basis is not orthonormal");
    }
}

ComplexMatrix MixedState::density() const {
    return basis * weights.cast<cplx>().asDiagonal() * basis.adjoint();
}

ComplexMatrix heisenberg_elements(const ComplexMatrix& basis, ProtocolMeasurement& measure) {
    const Eigen::Index r = basis.cols();
    const cplx i(0.0, 1.0);
    ComplexMatrix a(r, r);
    for (Eigen::Index n = 0; n < r; ++n) {
        a(n, n) = measure(basis.col(n));
        for (Eigen::Index m = 0; m < n; ++m) {
            const PolarizationStates s = polarization_states(basis.col(n), basis.col(m));
            const cplx ap = measure(s.a_plus), am = measure(s.a_minus);
            const cplx bp = measure(s.b_plus), bm = measure(s.b_minus);
            // ⟨m|W|n⟩ and ⟨n|W|m⟩ from the same four values
            a(m, n) = 0.5 * (ap - am + i * bp - i * bm);
            a(n, m) = 0.5 * (ap - am - i * bp + i * bm);
        }
    }
    return a;
}

double otoc_mixed(const MixedState& ms, const MeasuredUnitary& w, double t, const Evolution& evolution) {
    ms.validate();
    ProtocolMeasurement measure(w, evolution, t);
    const ComplexMatrix a = heisenberg_elements(ms.basis, measure);
    double f = 0.0;
    for (Eigen::Index n = 0; n < ms.rank(); ++n) {
        for (Eigen::Index m = 0; m < ms.rank(); ++m) {
            f += ms.weights(n) * ms.weights(n) * ms.weights(m) * std::norm(a(m, n));
        }
    }
    return f;
}

std::vector<double> otoc_mixed(const MixedState& ms, const OtocConfig& cfg, const SpinSystem& sys,
                               const Evolution& evolution) {
    cfg.validate();
    const MeasuredUnitary w = MeasuredUnitary::from_rotation(w_rotation(sys, cfg.theta, cfg.phi, cfg.epsilon));
    std::vector<double> out;
    out.reserve(cfg.times.size());
    for (double t : cfg.times) out.push_back(otoc_mixed(ms, w, t * evolution.time_unit(), evolution));
    return out;
}

GeneralVResult otoc_general_v(const MixedState& ms, const ComplexMatrix& v, const MeasuredUnitary& w,
                              double t, const Evolution& evolution) {
    ms.validate();
    check_square(v, ms.rank(), "otoc_general_v");
    if (!v.allFinite()) throw std::invalid_argument("otoc_general_v: coefficients must be finite");
    ProtocolMeasurement measure(w, evolution, t);
    const ComplexMatrix a = heisenberg_elements(ms.basis, measure);
    // Σ_j p_j Σ_k conj((vA)_kj) (Av)_kj
    const ComplexMatrix va = v * a;
    const ComplexMatrix av = a * v;
    cplx f = 0.0;
    for (Eigen::Index j = 0; j < ms.rank(); ++j) f += ms.weights(j) * va.col(j).dot(av.col(j));
    return {f, measure.count()};
}

std::vector<double> scrambling_series(const OtocResult& result) {
    std::vector<double> c;
    c.reserve(result.F.size());
    for (double f : result.F) {
        if (!(f >= -1e-12 && f <= 1.0 + 1e-12)) {
            throw std::invalid_argument("scrambling_series: F must lie in [0, 1]");
        }
        c.push_back(1.0 - f);
    }
    return c;
}

double population_variance(const RealVector& populations, SpinNumber j) {
    if (populations.size() != j.dimension()) throw std::invalid_argument("population_variance: dimension mismatch");
    double mean = 0.0, second = 0.0;
    for (Eigen::Index row = 0; row < populations.size(); ++row) {
        const double m = j.m_of_row(row);
        mean += populations(row) * m;
        second += populations(row) * m * m;
    }
    return std::max(0.0, second - mean * mean);
}

double VarianceCheck::max_relative_deviation() const {
    double peak = 0.0, dev = 0.0;
    for (std::size_t k = 0; k < variance.size(); ++k) {
        peak = std::max(peak, variance[k]);
        dev = std::max(dev, std::abs(c_over_eps2[k] - variance[k]));
    }
    return peak > 0.0 ? dev / peak : dev;
}

VarianceCheck variance_check(const OtocConfig& cfg, const SpinSystem& sys, const Evolution& evolution) {
    cfg.validate();
    if (cfg.epsilon == 0.0) throw std::invalid_argument("variance_check: epsilon must be nonzero");
    OtocConfig exact = cfg;
    exact.shots.reset();
    const std::vector<RealVector> pops = otoc_populations(exact, sys, evolution);
    const OtocResult res = otoc_from_populations(cfg.times, pops, sys.j, cfg.epsilon);

    VarianceCheck out;
    out.times = cfg.times;
    for (std::size_t k = 0; k < pops.size(); ++k) {
        out.variance.push_back(population_variance(pops[k], sys.j));
        out.c_over_eps2.push_back(res.C[k] / (cfg.epsilon * cfg.epsilon));
    }
    return out;
}

}  // namespace scrambletop
