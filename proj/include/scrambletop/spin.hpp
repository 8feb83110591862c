// spin.hpp: spin-J operator algebra, coherent states and axis rotations
//
// Basis convention: J_z eigenbasis ordered m = J, J−1, …, −J, so row 0 is |J, J⟩.

#pragma once

#include "scrambletop/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scrambletop {

// Spin quantum number stored as the integer 2J.
class SpinNumber {
public:
    constexpr SpinNumber() = default;
    static constexpr SpinNumber from_twice(int twice_j) { return SpinNumber(twice_j); }

    // Accepts J as a real number; 2J must be a positive integer.
    static SpinNumber from_value(double j) {
        const double twice = 2.0 * j;
        const double rounded = std::round(twice);
        if (!(std::abs(twice - rounded) < 1e-9) || rounded < 1.0) {
            throw std::invalid_argument("spin quantum number must be a positive half-integer, got " +
                                        std::to_string(j));
        }
        return SpinNumber(static_cast<int>(rounded));
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr Eigen::Index dimension() const { return twice_ + 1; }

    // Magnetic quantum number of basis row k.
    constexpr double m_of_row(Eigen::Index k) const { return value() - static_cast<double>(k); }

    std::string label() const {
        return (twice_ % 2 == 0) ? std::to_string(twice_ / 2) : std::to_string(twice_) + "/2";
    }

    friend constexpr bool operator==(SpinNumber, SpinNumber) = default;

private:
    constexpr explicit SpinNumber(int twice_j) : twice_(twice_j) {
        if (twice_j < 1) throw std::invalid_argument("spin quantum number must be positive");
    }
    int twice_ = 1;
};

template <typename Real>
struct SpinSystemT {
    SpinNumber j;
    ComplexMatrixT<Real> jx, jy, jz;

    Eigen::Index dimension() const { return j.dimension(); }
    Real value() const { return Real(j.value()); }

    // n·J for a real 3-vector n.
    ComplexMatrixT<Real> along(Real nx, Real ny, Real nz) const { return nx * jx + ny * jy + nz * jz; }
};

using SpinSystem = SpinSystemT<double>;

template <typename Real>
struct SpinCoherentStateT {
    Real theta = 0;
    Real phi = 0;
    ComplexVectorT<Real> amplitudes;
};

using SpinCoherentState = SpinCoherentStateT<double>;

// Unit vector n(θ, φ) = (sinθ cosφ, sinθ sinφ, cosθ).
template <typename Real>
Eigen::Matrix<Real, 3, 1> axis(Real theta, Real phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

template <typename Real = double>
SpinSystemT<Real> make_spin(SpinNumber j) {
    using Matrix = ComplexMatrixT<Real>;
    const Eigen::Index d = j.dimension();
    const Real jj = Real(j.value());
    Matrix raise = Matrix::Zero(d, d);
    Matrix jz = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const Real m = Real(j.m_of_row(k));
        jz(k, k) = m;
        // ⟨m+1| J+ |m⟩ sits one row above
        if (k > 0) raise(k - 1, k) = std::sqrt(jj * (jj + 1) - m * (m + 1));
    }
    const Matrix lower = raise.adjoint();
    SpinSystemT<Real> sys{j, (raise + lower) * Real(0.5),
                          (raise - lower) * std::complex<Real>(0, Real(-0.5)), jz};
    return sys;
}

template <typename Real = double>
SpinSystemT<Real> make_spin(double j) {
    return make_spin<Real>(SpinNumber::from_value(j));
}

// R(θ, φ) = exp(−iθ(−sinφ J_x + cosφ J_y)): rotates ẑ onto n(θ, φ).
template <typename Real>
ComplexMatrixT<Real> rotation(const SpinSystemT<Real>& sys, Real theta, Real phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
        throw std::invalid_argument("rotation: angles must be finite");
    }
    const ComplexMatrixT<Real> generator = -std::sin(phi) * sys.jx + std::cos(phi) * sys.jy;
    return expm_i_hermitian(generator, theta);
}

template <typename Real>
SpinCoherentStateT<Real> scs(const SpinSystemT<Real>& sys, Real theta, Real phi) {
    const ComplexMatrixT<Real> r = rotation(sys, theta, phi);
    return {theta, phi, r.col(0)};
}

// W_ε(Ω) = exp(−iε n(Ω)·J) with its analytically known eigensystem: eigenvectors
// R(θ,φ)|J,m⟩ (the columns of R) and eigenvalues exp(−imε).
template <typename Real>
struct AxisRotationT {
    ComplexMatrixT<Real> matrix;
    ComplexMatrixT<Real> eigenvectors;     // column k ↔ m = J − k
    ComplexVectorT<Real> eigenvalues;      // exp(−i m ε)
};

using AxisRotation = AxisRotationT<double>;

template <typename Real>
ComplexVectorT<Real> rotation_eigenvalues(SpinNumber j, Real epsilon) {
    ComplexVectorT<Real> mu(j.dimension());
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
        mu(k) = std::polar(Real(1), -Real(j.m_of_row(k)) * epsilon);
    }
    return mu;
}

template <typename Real>
AxisRotationT<Real> w_rotation(const SpinSystemT<Real>& sys, Real theta, Real phi, Real epsilon) {
    if (!std::isfinite(epsilon)) throw std::invalid_argument("w_rotation: epsilon must be finite");
    AxisRotationT<Real> w;
    w.eigenvectors = rotation(sys, theta, phi);
    w.eigenvalues = rotation_eigenvalues<Real>(sys.j, epsilon);
    w.matrix = w.eigenvectors * w.eigenvalues.asDiagonal() * w.eigenvectors.adjoint();
    return w;
}

// ⟨ψ|A|ψ⟩ for Hermitian A, returned as a real number.
template <typename Real>
Real expectation(const ComplexMatrixT<Real>& a, const ComplexVectorT<Real>& psi) {
    return psi.dot(a * psi).real();
}

template <typename Real>
Real variance(const ComplexMatrixT<Real>& a, const ComplexVectorT<Real>& psi) {
    const ComplexVectorT<Real> a_psi = a * psi;
    const Real mean = psi.dot(a_psi).real();
    return a_psi.squaredNorm() - mean * mean;
}

template <typename Real>
struct TransverseVarianceT {
    Real a = 0;
    Real b = 0;
};

// Variances of J'_x = R J_x R† and J'_y = R J_y R† in `state`, with R = R(θ, φ) of the
// state's direction.
template <typename Real>
TransverseVarianceT<Real> transverse_variance(const SpinCoherentStateT<Real>& state,
                                              const SpinSystemT<Real>& sys) {
    const ComplexMatrixT<Real> r = rotation(sys, state.theta, state.phi);
    const ComplexMatrixT<Real> jx_rot = r * sys.jx * r.adjoint();
    const ComplexMatrixT<Real> jy_rot = r * sys.jy * r.adjoint();
    return {variance(jx_rot, state.amplitudes), variance(jy_rot, state.amplitudes)};
}

using TransverseVariance = TransverseVarianceT<double>;

}  // namespace scrambletop
