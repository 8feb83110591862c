// numerics.hpp: dense complex eigensolvers and unitary exponentials
//
// Header-only kernels templated on the real scalar type. The Hermitian solver is a
// cyclic complex Jacobi iteration; unitary matrices are diagonalized through their
// commuting Hermitian parts (U + U†)/2 and (U − U†)/2i.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace scrambletop {

template <typename Real>
using ComplexMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealVector = RealVectorT<double>;
using RealMatrix = Eigen::MatrixXd;

// Raised when an iterative kernel fails to reach its tolerance or an integrated
// quantity drifts outside its allowed band.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + format_residual(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    static std::string format_residual(double r) {
        std::ostringstream os;
        os.precision(3);
        os << std::scientific << r;
        return os.str();
    }
    double residual_;
};

// Every tolerance shared between the kernels and their tests.
struct Tolerances {
    // max|A − A†| accepted by hermitian_eig, relative to max(1, max|A|).
    static constexpr double hermitian_input = 1e-12;
    // max|U†U − I| accepted by unitary_eig.
    static constexpr double unitary_input = 1e-9;
    // Jacobi stops once the off-diagonal Frobenius norm falls below this times ‖A‖_F.
    static constexpr double jacobi_offdiag = 1e-13;
    static constexpr int jacobi_max_sweeps = 100;
    // Eigenvalues of (U + U†)/2 closer than this are split with (U − U†)/2i.
    static constexpr double unitary_cluster = 1e-9;
    // Hermitian eigenvalues closer than this (relative) are ordered by their eigenvectors.
    static constexpr double eigenvalue_tie = 1e-12;
    // Post-condition for unitary_eig: max|U v − f v|.
    static constexpr double unitary_residual = 1e-9;
};

template <typename Real>
struct EigenSystem {
    RealVectorT<Real> eigenvalues;      // ascending (Hermitian) or phases in (−π, π] (unitary)
    ComplexMatrixT<Real> eigenvectors;  // orthonormal columns

    Eigen::Index size() const { return eigenvalues.size(); }
};

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return 0;
    return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
typename Derived::RealScalar hermiticity_error(const Eigen::MatrixBase<Derived>& a) {
    return max_abs(a - a.adjoint());
}

template <typename Derived>
typename Derived::RealScalar unitarity_error(const Eigen::MatrixBase<Derived>& u) {
    using Plain = typename Derived::PlainObject;
    Plain gram = u.adjoint() * u;
    return max_abs(gram - Plain::Identity(u.cols(), u.cols()));
}

namespace detail {

// Index of the first component whose magnitude is non-negligible.
template <typename Real>
Eigen::Index leading_index(const ComplexVectorT<Real>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > Real(1e-8)) return i;
    }
    return v.size();
}

// Lexicographic order on (leading index, leading real part, leading imaginary part).
template <typename Real>
bool eigenvector_less(const ComplexVectorT<Real>& a, const ComplexVectorT<Real>& b) {
    const auto ia = leading_index(a);
    const auto ib = leading_index(b);
    if (ia != ib) return ia < ib;
    if (ia == a.size()) return false;
    if (a(ia).real() != b(ib).real()) return a(ia).real() < b(ib).real();
    return a(ia).imag() < b(ib).imag();
}

// Sort columns by value; runs of values within `tie` of each other are ordered by
// their eigenvectors so degenerate spectra come out deterministically.
template <typename Real>
void sort_spectrum(EigenSystem<Real>& es, Real tie) {
    const Eigen::Index n = es.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return es.eigenvalues(a) < es.eigenvalues(b);
    });
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() &&
               es.eigenvalues(order[end]) - es.eigenvalues(order[end - 1]) <= tie) {
            ++end;
        }
        if (end - start > 1) {
            std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end),
                             [&](Eigen::Index a, Eigen::Index b) {
                                 return eigenvector_less<Real>(es.eigenvectors.col(a),
                                                               es.eigenvectors.col(b));
                             });
        }
        start = end;
    }
    EigenSystem<Real> sorted;
    sorted.eigenvalues.resize(n);
    sorted.eigenvectors.resize(es.eigenvectors.rows(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        sorted.eigenvalues(k) = es.eigenvalues(order[static_cast<std::size_t>(k)]);
        sorted.eigenvectors.col(k) = es.eigenvectors.col(order[static_cast<std::size_t>(k)]);
    }
    es = std::move(sorted);
}

// Applies the plane rotation G = [[c, s·e], [−s·ē, c]] to columns p and q of m.
template <typename Real>
inline void rotate_columns(ComplexMatrixT<Real>& m, Eigen::Index p, Eigen::Index q, Real c,
                           Real s, std::complex<Real> e) {
    std::complex<Real>* colp = m.col(p).data();
    std::complex<Real>* colq = m.col(q).data();
    const std::complex<Real> se = s * e;
    const std::complex<Real> sec = s * std::conj(e);
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const std::complex<Real> ap = colp[k];
        const std::complex<Real> aq = colq[k];
        colp[k] = c * ap - sec * aq;
        colq[k] = se * ap + c * aq;
    }
}

template <typename Real>
Real offdiagonal_norm(const ComplexMatrixT<Real>& a) {
    Real sum = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) sum += std::norm(a(i, j));
        }
    }
    return std::sqrt(sum);
}

}  // namespace detail

namespace detail {

// Cyclic Jacobi sweeps on Hermitian `a`, accumulating rotations into `v`.
template <typename Real>
EigenSystem<Real> jacobi_diagonalize(ComplexMatrixT<Real> a, ComplexMatrixT<Real> v,
                                     Real scale_abs) {
    const Eigen::Index n = a.rows();
    const Real frob = a.norm();
    const Real target = Real(Tolerances::jacobi_offdiag) * frob;

    bool converged = n <= 1 || frob == Real(0);
    for (int sweep = 0; !converged && sweep < Tolerances::jacobi_max_sweeps; ++sweep) {
        if (offdiagonal_norm(a) <= target) {
            converged = true;
            break;
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const std::complex<Real> b = a(p, q);
                const Real absb = std::abs(b);
                const Real app = a(p, p).real();
                const Real aqq = a(q, q).real();
                if (absb <= std::numeric_limits<Real>::min()) continue;
                // below roundoff of both diagonal entries: drop without rotating
                if (std::abs(app) + Real(100) * absb == std::abs(app) &&
                    std::abs(aqq) + Real(100) * absb == std::abs(aqq)) {
                    a(p, q) = 0;
                    a(q, p) = 0;
                    continue;
                }
                const std::complex<Real> e = b / absb;
                const Real theta = (aqq - app) / (Real(2) * absb);
                Real t = Real(1) / (std::abs(theta) + std::sqrt(theta * theta + Real(1)));
                if (theta < 0) t = -t;
                const Real c = Real(1) / std::sqrt(t * t + Real(1));
                const Real s = t * c;

                rotate_columns(a, p, q, c, s, e);
                for (Eigen::Index k = 0; k < n; ++k) {
                    a(p, k) = std::conj(a(k, p));
                    a(q, k) = std::conj(a(k, q));
                }
                a(p, p) = app - t * absb;
                a(q, q) = aqq + t * absb;
                a(p, q) = 0;
                a(q, p) = 0;
                rotate_columns(v, p, q, c, s, e);
            }
        }
    }
    if (!converged) {
        const Real off = offdiagonal_norm(a);
        if (off > target) {
            throw NumericalError("hermitian_eig: Jacobi iteration did not converge", double(off));
        }
    }

    EigenSystem<Real> es;
    es.eigenvalues = a.diagonal().real();
    es.eigenvectors = std::move(v);
    sort_spectrum(es, Real(Tolerances::eigenvalue_tie) * scale_abs);
    return es;
}

// Modified Gram-Schmidt on the columns of m, keeping each column close to its input.
template <typename Real>
ComplexMatrixT<Real> orthonormalize_columns(ComplexMatrixT<Real> m) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const std::complex<Real> proj = m.col(j).dot(m.col(k));
            m.col(k) -= proj * m.col(j);
        }
        const Real norm = m.col(k).norm();
        if (!(norm > Real(1e-3))) throw std::invalid_argument("basis columns are not independent");
        m.col(k) /= norm;
    }
    return m;
}

template <typename Real>
Real check_hermitian(const ComplexMatrixT<Real>& a, const char* who) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    }
    if (!a.allFinite()) throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
    const Real scale_abs = std::max(Real(1), max_abs(a));
    if (hermiticity_error(a) > Real(Tolerances::hermitian_input) * scale_abs) {
        throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
    }
    return scale_abs;
}

}  // namespace detail

// Cyclic Jacobi eigensolver for a complex Hermitian matrix.
template <typename Derived>
EigenSystem<typename Derived::RealScalar> hermitian_eig(const Eigen::MatrixBase<Derived>& input) {
    using Real = typename Derived::RealScalar;
    using Matrix = ComplexMatrixT<Real>;
    const Matrix a = input;
    const Real scale_abs = detail::check_hermitian(a, "hermitian_eig");
    return detail::jacobi_diagonalize<Real>((a + a.adjoint()) * Real(0.5),
                                            Matrix::Identity(a.rows(), a.cols()), scale_abs);
}

// Warm-started variant: `basis` is a unitary that nearly diagonalizes the input
// (for instance the eigenvectors of a neighbouring matrix).
template <typename Derived, typename BasisDerived>
EigenSystem<typename Derived::RealScalar> hermitian_eig(const Eigen::MatrixBase<Derived>& input,
                                                        const Eigen::MatrixBase<BasisDerived>& basis) {
    using Real = typename Derived::RealScalar;
    using Matrix = ComplexMatrixT<Real>;
    const Matrix a = input;
    const Real scale_abs = detail::check_hermitian(a, "hermitian_eig");
    if (basis.rows() != a.rows() || basis.cols() != a.cols()) {
        throw std::invalid_argument("hermitian_eig: basis dimension mismatch");
    }
    const Matrix b = detail::orthonormalize_columns<Real>(basis);
    Matrix rotated = b.adjoint() * a * b;
    rotated = (rotated + rotated.adjoint()).eval() * Real(0.5);
    return detail::jacobi_diagonalize<Real>(std::move(rotated), b, scale_abs);
}

// V·diag(f(λ))·V† for a Hermitian eigensystem.
template <typename Real, typename Fn>
ComplexMatrixT<Real> spectral_function(const EigenSystem<Real>& es, Fn&& fn) {
    ComplexVectorT<Real> diag(es.size());
    for (Eigen::Index k = 0; k < es.size(); ++k) diag(k) = fn(es.eigenvalues(k));
    return es.eigenvectors * diag.asDiagonal() * es.eigenvectors.adjoint();
}

// exp(−i·H·dt) for Hermitian H.
template <typename Derived>
ComplexMatrixT<typename Derived::RealScalar> expm_i_hermitian(
    const Eigen::MatrixBase<Derived>& h, typename Derived::RealScalar dt) {
    using Real = typename Derived::RealScalar;
    const auto es = hermitian_eig(h);
    return spectral_function(es, [dt](Real lambda) {
        return std::polar(Real(1), -lambda * dt);
    });
}

// Maps a phase to the branch (−π, π].
template <typename Real>
Real wrap_phase(Real phi) {
    const Real pi = Real(3.14159265358979323846264338327950288L);
    const Real two_pi = Real(2) * pi;
    phi = std::fmod(phi, two_pi);
    if (phi <= -pi) phi += two_pi;
    if (phi > pi) phi -= two_pi;
    return phi;
}

// Diagonalizes a unitary U. The returned eigenvalues are phases φ_i ∈ (−π, π] with
// U v_i = exp(−i φ_i) v_i.
template <typename Derived>
EigenSystem<typename Derived::RealScalar> unitary_eig(const Eigen::MatrixBase<Derived>& input) {
    using Real = typename Derived::RealScalar;
    using Matrix = ComplexMatrixT<Real>;

    if (input.rows() != input.cols()) {
        throw std::invalid_argument("unitary_eig: matrix must be square");
    }
    const Matrix u = input;
    if (unitarity_error(u) > Real(Tolerances::unitary_input)) {
        throw std::invalid_argument("unitary_eig: matrix is not unitary");
    }
    const Eigen::Index n = u.rows();
    const Matrix u_adj = u.adjoint();
    const Matrix cos_part = (u + u_adj) * Real(0.5);
    const Matrix sin_part = (u - u_adj) * std::complex<Real>(0, Real(-0.5));

    EigenSystem<Real> es = hermitian_eig(cos_part);
    Matrix& v = es.eigenvectors;

    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && es.eigenvalues(end) - es.eigenvalues(end - 1) <=
                              Real(Tolerances::unitary_cluster)) {
            ++end;
        }
        const Eigen::Index width = end - start;
        if (width > 1) {
            const Matrix block = v.middleCols(start, width);
            const Matrix restricted = block.adjoint() * sin_part * block;
            const auto split = hermitian_eig(restricted);
            v.middleCols(start, width) = block * split.eigenvectors;
        }
        start = end;
    }

    Real worst = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const ComplexVectorT<Real> uv = u * v.col(k);
        const std::complex<Real> f = v.col(k).dot(uv);
        const std::complex<Real> f_unit = f / std::abs(f);
        es.eigenvalues(k) = wrap_phase(-std::arg(f_unit));
        worst = std::max(worst, (uv - f_unit * v.col(k)).cwiseAbs().maxCoeff());
    }
    if (worst > Real(Tolerances::unitary_residual)) {
        throw NumericalError("unitary_eig: eigenvector residual above tolerance", double(worst));
    }
    detail::sort_spectrum(es, Real(Tolerances::eigenvalue_tie));
    return es;
}

}  // namespace scrambletop
