#include "scrambletop/floquet.hpp"

#include "scrambletop/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scrambletop {

double QuantumParams::tau() const { return 2.0 * std::numbers::pi / omega; }

void QuantumParams::validate() const { classical().validate(); }

namespace {

// Static and driven parts of H(t), built once per product.
struct DrivenTop {
    ComplexMatrix static_part;
    ComplexMatrix drive;
    double gamma;
    double omega;

    DrivenTop(const QuantumParams& p, const SpinSystem& sys)
        : static_part(p.alpha * sys.jz + (p.beta / sys.value()) * (sys.jx * sys.jx)),
          drive(sys.jy),
          gamma(p.gamma),
          omega(p.omega) {}

    ComplexMatrix at(double t) const { return static_part + (gamma * std::cos(omega * t)) * drive; }
};

void check_dimensions(const QuantumParams& p, const SpinSystem& sys) {
    if (p.j != sys.j) throw std::invalid_argument("QuantumParams spin does not match SpinSystem");
}

double min_circular_gap(const RealVector& phases) {
    const Eigen::Index n = phases.size();
    if (n < 2) return 2.0 * std::numbers::pi;
    double gap = 2.0 * std::numbers::pi - (phases(n - 1) - phases(0));
    for (Eigen::Index k = 1; k < n; ++k) gap = std::min(gap, phases(k) - phases(k - 1));
    return gap;
}

// Newton-Schulz steps toward the unitary polar factor; moves U by O(‖U†U − I‖).
ComplexMatrix polish_unitary(ComplexMatrix u) {
    const Eigen::Index d = u.rows();
    for (int it = 0; it < 3 && unitarity_error(u) > 1e-15; ++it) {
        const ComplexMatrix gram = u.adjoint() * u;
        u = 0.5 * u * (3.0 * ComplexMatrix::Identity(d, d) - gram);
    }
    return u;
}

}  // namespace

ComplexMatrix hamiltonian(double t, const QuantumParams& p, const SpinSystem& sys) {
    check_dimensions(p, sys);
    return DrivenTop(p, sys).at(t);
}

ComplexMatrix segment_product(const QuantumParams& p, const SpinSystem& sys, int segments,
                              int first, int count) {
    p.validate();
    check_dimensions(p, sys);
    if (segments < 1) throw std::invalid_argument("segment count must be at least 1");
    if (count < 0) count = segments - first;
    if (first < 0 || first + count > segments) {
        throw std::invalid_argument("segment range outside the period");
    }
    const DrivenTop top(p, sys);
    const double dt = p.tau() / segments;
    const Eigen::Index d = sys.dimension();
    ComplexMatrix u = ComplexMatrix::Identity(d, d);
    if (count == 0) return u;

    EigenSystem<double> es = hermitian_eig(top.at((first + 0.5) * dt));
    for (int k = first; k < first + count; ++k) {
        if (k > first) es = hermitian_eig(top.at((k + 0.5) * dt), es.eigenvectors);
        const ComplexMatrix step =
            spectral_function(es, [dt](double lambda) { return std::polar(1.0, -lambda * dt); });
        u = step * u;
    }
    return u;
}

FloquetOperator floquet_operator(const QuantumParams& p, const SpinSystem& sys,
                                 const FloquetOptions& opt) {
    if (opt.segments < 1) throw std::invalid_argument("segment count must be at least 1");
    FloquetOperator f;
    f.tau = p.tau();
    f.segments = opt.segments;
    f.unitary = segment_product(p, sys, opt.segments);

    if (opt.certify) {
        double gap = 0.0;
        for (;;) {
            const ComplexMatrix finer = segment_product(p, sys, 2 * f.segments);
            gap = max_abs(f.unitary - finer);
            if (gap < opt.convergence_target) break;
            if (2 * f.segments > opt.max_segments) {
                throw NumericalError("floquet_operator: segment product did not converge by N = " +
                                         std::to_string(f.segments),
                                     gap);
            }
            f.segments *= 2;
            f.unitary = finer;
        }
        f.convergence_gap = gap;
    }

    const double drift = unitarity_error(f.unitary);
    if (drift > 1e-9) throw NumericalError("floquet_operator: product lost unitarity", drift);
    f.unitary = polish_unitary(f.unitary);

    f.spectrum = unitary_eig(f.unitary);
    f.min_phase_gap = min_circular_gap(f.spectrum.eigenvalues);
    return f;
}

PeriodSplit split_time(double t, const FloquetOperator& f) {
    if (!(t >= 0.0)) throw std::invalid_argument("evolve: time must be nonnegative");
    const double periods = t / f.tau;
    long whole = static_cast<long>(std::floor(periods + 1e-9));
    long partial = std::lround((periods - static_cast<double>(whole)) * f.segments);
    if (partial < 0) partial = 0;
    if (partial >= f.segments) {
        ++whole;
        partial = 0;
    }
    return {whole, static_cast<int>(partial)};
}

ComplexVector evolve(const ComplexVector& state, double t, const FloquetOperator& f,
                     const QuantumParams& p, const SpinSystem& sys) {
    const PeriodSplit split = split_time(t, f);
    if (state.size() != f.dimension()) throw std::invalid_argument("evolve: state dimension mismatch");
    ComplexVector psi = state;
    for (long n = 0; n < split.whole; ++n) psi = f.unitary * psi;
    if (split.partial > 0) psi = segment_product(p, sys, f.segments, 0, split.partial) * psi;
    return psi;
}

ParticipationRatio participation_ratio(const ComplexVector& state, const FloquetOperator& f) {
    if (state.size() != f.dimension()) {
        throw std::invalid_argument("participation_ratio: state dimension mismatch");
    }
    const ComplexVector overlaps = f.spectrum.eigenvectors.adjoint() * state;
    double ipr = 0.0;
    for (Eigen::Index i = 0; i < overlaps.size(); ++i) {
        const double w = std::norm(overlaps(i));
        ipr += w * w;
    }
    return {1.0 / ipr, f.has_degenerate_phases()};
}

Eigen::MatrixXd pr_map(const classical::Grid& grid, const FloquetOperator& f, const SpinSystem& sys,
                       int threads) {
    grid.validate();
    Eigen::MatrixXd out(grid.n_theta, grid.n_phi);
    parallel_for(static_cast<std::size_t>(grid.n_theta) * grid.n_phi, threads, [&](std::size_t c) {
        const int i = static_cast<int>(c / grid.n_phi);
        const int j = static_cast<int>(c % grid.n_phi);
        const auto state = scs(sys, grid.theta_at(i), grid.phi_at(j));
        out(i, j) = participation_ratio(state.amplitudes, f).value;
    });
    return out;
}

}  // namespace scrambletop
