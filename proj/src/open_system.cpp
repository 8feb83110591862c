#include "scrambletop/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace scrambletop {

namespace {

void check_density(const ComplexMatrix& rho, Eigen::Index d, const char* who) {
    if (rho.rows() != d || rho.cols() != d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    if (hermiticity_error(rho) > 1e-10) throw std::invalid_argument(std::string(who) + ": ρ₀ must be Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw std::invalid_argument(std::string(who) + ": Tr ρ₀ must be 1");
    const ComplexMatrix sym = 0.5 * (rho + rho.adjoint());
    if (hermitian_eig(sym).eigenvalues.minCoeff() < -1e-10) {
        throw std::invalid_argument(std::string(who) + ": ρ₀ must be positive semidefinite");
    }
}

void check_pure(const ComplexMatrix& rho, const char* who) {
    if (std::abs((rho * rho).trace() - 1.0) > 1e-10) {
        throw std::invalid_argument(std::string(who) + ": ρ₀ must be a pure state");
    }
}

// Hermiticity, trace and positivity of an evolved ρ.
void check_evolved(const ComplexMatrix& rho, double t) {
    const double herm = hermiticity_error(rho);
    if (herm > 1e-9) throw NumericalError("evolve_density: Hermiticity lost at t = " + std::to_string(t), herm);
    const double trace = std::abs(rho.trace() - 1.0);
    if (trace > 1e-9) throw NumericalError("evolve_density: trace drifted at t = " + std::to_string(t), trace);
    const double lowest = hermitian_eig(0.5 * (rho + rho.adjoint())).eigenvalues.minCoeff();
    if (lowest < -1e-8) {
        throw NumericalError("evolve_density: negative eigenvalue at t = " + std::to_string(t) +
                                 "; reduce step_scale",
                             -lowest);
    }
}

// Upper bound on the generator norm: max over sampled ‖H(t)‖_F plus Σ γ‖L‖_F².
double generator_bound(const LindbladModel& m) {
    double h = 0.0;
    for (int k = 0; k < 16; ++k) h = std::max(h, m.hamiltonian(m.time_unit * k / 16.0).norm());
    double dissipation = 0.0;
    for (const JumpOperator& jump : m.jumps) dissipation += jump.rate * jump.op.squaredNorm();
    return std::max(h + dissipation, 1e-12);
}

int step_count(double span, double bound, const DensityOptions& opt) {
    if (!(opt.step_scale > 0.0)) throw std::invalid_argument("DensityOptions: step_scale must be positive");
    return std::max(1, static_cast<int>(std::ceil(span * bound / opt.step_scale)));
}

// Classical RK4 of y' = f(y, t) on [t0, t1] with n equal steps.
template <typename State, typename Rhs>
State rk4(State y, double t0, double t1, int n, Rhs&& f) {
    const double h = (t1 - t0) / n;
    for (int s = 0; s < n; ++s) {
        const double t = t0 + s * h;
        const State k1 = f(y, t);
        const State k2 = f(State(y + 0.5 * h * k1), t + 0.5 * h);
        const State k3 = f(State(y + 0.5 * h * k2), t + 0.5 * h);
        const State k4 = f(State(y + h * k3), t + h);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

ComplexMatrix vectorize(const ComplexMatrix& rho) {
    const Eigen::Index d = rho.rows();
    ComplexMatrix x(d * d, 1);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i * d + j, 0) = rho(i, j);
    return x;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

LindbladModel LindbladModel::closed(const ComplexMatrix& h, double time_unit) {
    LindbladModel m;
    m.hamiltonian = [h](double) { return h; };
    m.dimension = h.rows();
    m.time_unit = time_unit;
    return m;
}

LindbladModel LindbladModel::driven_top(const QuantumParams& p, const SpinSystem& sys,
                                        std::vector<JumpOperator> jumps) {
    p.validate();
    if (p.j != sys.j) throw std::invalid_argument("LindbladModel: QuantumParams spin does not match SpinSystem");
    LindbladModel m;
    const ComplexMatrix static_part = p.alpha * sys.jz + (p.beta / sys.value()) * (sys.jx * sys.jx);
    const ComplexMatrix drive = sys.jy;
    const double gamma = p.gamma, omega = p.omega;
    m.hamiltonian = [static_part, drive, gamma, omega](double t) {
        return ComplexMatrix(static_part + (gamma * std::cos(omega * t)) * drive);
    };
    m.jumps = std::move(jumps);
    m.dimension = sys.dimension();
    m.time_unit = p.tau();
    return m;
}

void LindbladModel::validate() const {
    if (!hamiltonian) throw std::invalid_argument("LindbladModel: missing Hamiltonian");
    if (!(time_unit > 0.0)) throw std::invalid_argument("LindbladModel: time unit must be positive");
    const ComplexMatrix h = hamiltonian(0.0);
    if (h.rows() != dimension || h.cols() != dimension) {
        throw std::invalid_argument("LindbladModel: Hamiltonian dimension mismatch");
    }
    if (hermiticity_error(h) > 1e-12 * std::max(1.0, max_abs(h))) {
        throw std::invalid_argument("LindbladModel: Hamiltonian must be Hermitian");
    }
    for (const JumpOperator& jump : jumps) {
        if (!(jump.rate >= 0.0) || !std::isfinite(jump.rate)) {
            throw std::invalid_argument("LindbladModel: jump rates must be nonnegative");
        }
        if (jump.op.rows() != dimension || jump.op.cols() != dimension) {
            throw std::invalid_argument("LindbladModel: jump operator dimension mismatch");
        }
    }
}

LindbladModel dephasing_model(const QuantumParams& p, const SpinSystem& sys, double rate) {
    return LindbladModel::driven_top(p, sys, {{sys.jz, rate}});
}

LindbladModel damping_model(const QuantumParams& p, const SpinSystem& sys, double rate) {
    const ComplexMatrix lower = sys.jx - cplx(0.0, 1.0) * sys.jy;
    return LindbladModel::driven_top(p, sys, {{lower, rate}});
}

namespace {

ComplexMatrix assemble_superoperator(const LindbladModel& m, double t) {
    const Eigen::Index d = m.dimension;
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const ComplexMatrix h = m.hamiltonian(t);
    ComplexMatrix sup = cplx(0.0, -1.0) * (kron(h, id) - kron(id, h.transpose()));
    for (const JumpOperator& jump : m.jumps) {
        if (jump.rate == 0.0) continue;
        const ComplexMatrix ldl = jump.op.adjoint() * jump.op;
        sup += jump.rate * (kron(jump.op, jump.op.conjugate()) - 0.5 * kron(ldl, id) -
                            0.5 * kron(id, ldl.transpose()));
    }
    return sup;
}

}  // namespace

ComplexMatrix build_superoperator(const LindbladModel& m, double t) {
    m.validate();
    return assemble_superoperator(m, t);
}

ComplexMatrix lindblad_rhs(const LindbladModel& m, const ComplexMatrix& rho, double t) {
    const ComplexMatrix h = m.hamiltonian(t);
    ComplexMatrix out = cplx(0.0, -1.0) * (h * rho - rho * h);
    for (const JumpOperator& jump : m.jumps) {
        if (jump.rate == 0.0) continue;
        const ComplexMatrix ldl = jump.op.adjoint() * jump.op;
        out += jump.rate * (jump.op * rho * jump.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
    }
    return out;
}

std::vector<ComplexMatrix> density_trajectory(const ComplexMatrix& rho0, const LindbladModel& m,
                                              const std::vector<double>& times,
                                              const DensityOptions& opt) {
    m.validate();
    check_density(rho0, m.dimension, "evolve_density");
    const double bound = generator_bound(m);
    const auto rhs = [&m](const ComplexMatrix& rho, double t) { return lindblad_rhs(m, rho, t); };
    std::vector<ComplexMatrix> out;
    out.reserve(times.size());
    ComplexMatrix rho = rho0;
    double now = 0.0;
    for (double t : times) {
        if (!(t >= now)) throw std::invalid_argument("evolve_density: times must be nonnegative and nondecreasing");
        if (t > now) rho = rk4<ComplexMatrix>(rho, now, t, step_count(t - now, bound, opt), rhs);
        now = t;
        check_evolved(rho, t);
        out.push_back(rho);
    }
    return out;
}

ComplexMatrix evolve_density(const ComplexMatrix& rho0, const LindbladModel& m, double t,
                             const DensityOptions& opt) {
    return density_trajectory(rho0, m, {t}, opt).front();
}

std::vector<double> otoc_open_approx(const ComplexMatrix& rho0, const OtocConfig& cfg,
                                     const SpinSystem& sys, const LindbladModel& m,
                                     const DensityOptions& opt) {
    cfg.validate();
    check_pure(rho0, "otoc_open_approx");
    if (m.dimension != sys.dimension()) throw std::invalid_argument("otoc_open_approx: dimension mismatch");
    const MeasuredUnitary w =
        MeasuredUnitary::from_rotation(w_rotation(sys, cfg.theta, cfg.phi, cfg.epsilon));
    std::vector<double> absolute(cfg.times.size());
    for (std::size_t k = 0; k < absolute.size(); ++k) absolute[k] = cfg.times[k] * m.time_unit;
    const std::vector<ComplexMatrix> rhos = density_trajectory(rho0, m, absolute, opt);
    std::vector<double> out;
    out.reserve(rhos.size());
    for (const ComplexMatrix& rho : rhos) {
        const RealVector pop = (w.eigenvectors.adjoint() * rho * w.eigenvectors).diagonal().real();
        out.push_back(std::norm(w.expectation(pop)));
    }
    return out;
}

double doubled_evolution_check(const ComplexMatrix& rho0, const LindbladModel& m, double t,
                               const DensityOptions& opt) {
    m.validate();
    const Eigen::Index d = m.dimension;
    if (d > 16) throw std::invalid_argument("doubled_evolution_check: refusing d > 16 (d⁴ storage)");
    check_density(rho0, d, "doubled_evolution_check");
    if (!(t >= 0.0)) throw std::invalid_argument("doubled_evolution_check: time must be nonnegative");

    // ρ̃ stored as X = [ρ̃_{ij,mn}] with row i·d+j and column m·d+n; Ẋ = MX + XMᵀ
    const ComplexMatrix x0 = vectorize(rho0);
    ComplexMatrix doubled = x0 * x0.transpose();
    const ComplexMatrix rho = evolve_density(rho0, m, t, opt);
    if (t > 0.0) {
        const int steps = step_count(t, generator_bound(m), opt);
        doubled = rk4<ComplexMatrix>(doubled, 0.0, t, steps, [&m](const ComplexMatrix& x, double s) {
            const ComplexMatrix sup = assemble_superoperator(m, s);
            return ComplexMatrix(sup * x + x * sup.transpose());
        });
    }
    const ComplexMatrix x = vectorize(rho);
    return max_abs(doubled - x * x.transpose());
}

}  // namespace scrambletop
