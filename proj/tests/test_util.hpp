#pragma once

#include <Eigen/Dense>

#include "qcrl/operators.hpp"
#include "qcrl/rng.hpp"

namespace qcrl::testutil {

inline Matrix random_matrix(Rng& rng, Eigen::Index d) {
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
    }
    return m;
}

inline Matrix random_hermitian(Rng& rng, Eigen::Index d) {
    const Matrix g = random_matrix(rng, d);
    return 0.5 * (g + g.adjoint().eval());
}

// Haar-ish unitary via QR of a Gaussian matrix.
inline Matrix random_unitary(Rng& rng, Eigen::Index d) {
    const Matrix g = random_matrix(rng, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        const Complex rii = r(i, i);
        q.col(i) *= rii / std::abs(rii);
    }
    return q;
}

// Unitary with eigenphases drawn away from the principal branch cut.
inline Matrix random_unitary_bounded(Rng& rng, Eigen::Index d, double margin = 0.1) {
    const Matrix v = random_unitary(rng, d);
    Matrix diag = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double phi = rng.uniform(-M_PI + margin, M_PI - margin);
        diag(i, i) = std::exp(Complex(0.0, -phi));
    }
    return v * diag * v.adjoint();
}

}  // namespace qcrl::testutil
