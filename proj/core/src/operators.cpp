#include "qcrl/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "qcrl/errors.hpp"

namespace qcrl {

namespace {
constexpr Complex kI{0.0, 1.0};
}

HermitianOp HermitianOp::checked(Matrix m, double tol) {
    if (m.rows() != m.cols()) {
        throw ContractViolation("HermitianOp: matrix is not square");
    }
    const double dev = (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
    if (dev > tol) {
        throw ContractViolation("HermitianOp: entries deviate from conjugate transpose by " +
                                std::to_string(dev));
    }
    // Symmetrize so downstream eigensolvers see an exactly Hermitian matrix.
    Matrix sym = 0.5 * (m + m.adjoint().eval());
    return HermitianOp(std::move(sym));
}

UnitaryOp UnitaryOp::checked(Matrix m, double tol_scale) {
    if (m.rows() != m.cols()) {
        throw ContractViolation("UnitaryOp: matrix is not square");
    }
    const double d = static_cast<double>(m.rows());
    const double dev = (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).norm();
    if (dev > tol_scale * d) {
        throw ContractViolation("UnitaryOp: ||U^dag U - I||_F = " + std::to_string(dev));
    }
    return UnitaryOp(std::move(m));
}

Matrix mat_exp(const Matrix& h, double s) {
    const Eigen::Index d = h.rows();
    if (d == 2) {
        // H = c0 I + c . sigma
        const double c0 = 0.5 * std::real(h(0, 0) + h(1, 1));
        const double cx = std::real(h(0, 1));
        const double cy = std::imag(h(1, 0));
        const double cz = 0.5 * std::real(h(0, 0) - h(1, 1));
        const double r = std::sqrt(cx * cx + cy * cy + cz * cz);
        const Complex phase = std::exp(-kI * (s * c0));
        Matrix u(2, 2);
        if (r == 0.0) {
            u << phase, 0.0, 0.0, phase;
            return u;
        }
        const double c = std::cos(s * r);
        const double sn = std::sin(s * r) / r;
        u(0, 0) = phase * Complex(c, -sn * cz);
        u(1, 1) = phase * Complex(c, sn * cz);
        u(0, 1) = phase * (-kI * sn * Complex(cx, -cy));
        u(1, 0) = phase * (-kI * sn * Complex(cx, cy));
        return u;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Eigen::VectorXd& lam = es.eigenvalues();
    Eigen::VectorXcd phases(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        phases(i) = std::exp(-kI * (s * lam(i)));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

UnitaryOp mat_exp(const HermitianOp& h, double s) {
    return UnitaryOp::trusted(mat_exp(h.matrix(), s));
}

HermitianOp mat_log_unitary(const UnitaryOp& u, const std::optional<HermitianOp>& branch_hint) {
    const Eigen::Index d = u.dim();
    if (branch_hint && branch_hint->dim() != d) {
        throw DimensionMismatch("mat_log_unitary: hint dimension mismatch");
    }
    // Schur of a unitary (normal) matrix: T is diagonal up to round-off and
    // Q is orthonormal, which keeps degenerate clusters well conditioned.
    Eigen::ComplexSchur<Matrix> schur(u.matrix());
    Matrix q = schur.matrixU();
    Eigen::VectorXcd lam = schur.matrixT().diagonal();

    constexpr double cluster_tol = 1e-8;
    constexpr double cut_tol = 1e-9;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    // Group (nearly) equal eigenvalues; within a degenerate cluster the
    // eigenvectors are arbitrary, so align them with the hint.
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        std::vector<Eigen::Index> cluster{i};
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (!used[static_cast<std::size_t>(j)] && std::abs(lam(i) - lam(j)) < cluster_tol) {
                cluster.push_back(j);
                used[static_cast<std::size_t>(j)] = true;
            }
        }
        if (cluster.size() < 2) continue;
        const bool at_cut = std::abs(lam(i) - Complex(-1.0, 0.0)) < 1e-6;
        if (!branch_hint) {
            if (at_cut) {
                throw BranchAmbiguity(
                    "mat_log_unitary: degenerate eigenphase at the branch cut and no hint");
            }
            continue;  // principal branch is unambiguous away from the cut
        }
        const Eigen::Index n = static_cast<Eigen::Index>(cluster.size());
        Matrix block(d, n);
        for (Eigen::Index k = 0; k < n; ++k) block.col(k) = q.col(cluster[static_cast<std::size_t>(k)]);
        Eigen::SelfAdjointEigenSolver<Matrix> sub(block.adjoint() * branch_hint->matrix() * block);
        block = block * sub.eigenvectors();
        for (Eigen::Index k = 0; k < n; ++k) q.col(cluster[static_cast<std::size_t>(k)]) = block.col(k);
    }

    Eigen::VectorXd phi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        // exp(-i phi) = lambda  =>  phi = -arg(lambda), principal in (-pi, pi].
        double p = -std::arg(lam(i));
        if (p <= -std::numbers::pi + 0.0) p += two_pi;  // map -pi to +pi
        if (branch_hint) {
            const double h =
                std::real(q.col(i).dot(branch_hint->matrix() * q.col(i)));
            p += two_pi * std::round((h - p) / two_pi);
        } else if (std::abs(std::abs(p) - std::numbers::pi) < cut_tol) {
            // A lone eigenphase exactly at the cut is still principal (+pi),
            // so only the degenerate case above is ambiguous.
        }
        phi(i) = p;
    }
    Matrix eta = q * phi.asDiagonal() * q.adjoint();
    eta = 0.5 * (eta + eta.adjoint().eval());
    return HermitianOp::trusted(std::move(eta));
}

double pauli_project(const HermitianOp& eta, const HermitianOp& sigma) {
    if (eta.dim() != sigma.dim()) {
        throw DimensionMismatch("pauli_project: dimension mismatch");
    }
    return std::real((eta.matrix().adjoint() * sigma.matrix()).trace());
}

double frobenius_norm(const Matrix& m) { return m.norm(); }
double frobenius_norm(const HermitianOp& m) { return m.matrix().norm(); }

double gate_fidelity(const Matrix& u, const Matrix& v) {
    if (u.rows() != v.rows()) {
        throw DimensionMismatch("gate_fidelity: dimension mismatch");
    }
    return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

double gate_fidelity(const UnitaryOp& u, const UnitaryOp& v) {
    return gate_fidelity(u.matrix(), v.matrix());
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace qcrl
