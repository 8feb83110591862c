// random_matrices.hpp: seeded random states and operators for checks and tests

#pragma once

#include "scrambletop/numerics.hpp"
#include "scrambletop/rng.hpp"

#include <Eigen/QR>

namespace scrambletop {

// Entries with real and imaginary parts uniform on [−1, 1).
inline ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    return m;
}

inline ComplexVector random_state(Eigen::Index d, CounterRng& rng) {
    const ComplexVector v = random_complex(d, 1, rng);
    return v.normalized();
}

inline ComplexMatrix random_hermitian(Eigen::Index d, CounterRng& rng) {
    const ComplexMatrix a = random_complex(d, d, rng);
    return 0.5 * (a + a.adjoint());
}

// Q factor of a random complex matrix.
inline ComplexMatrix random_unitary(Eigen::Index d, CounterRng& rng) {
    const Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(d, d, rng));
    return qr.householderQ() * ComplexMatrix::Identity(d, d);
}

}  // namespace scrambletop
