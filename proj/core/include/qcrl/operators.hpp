#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

namespace qcrl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Hermitian generator (Hamiltonian, Magnus term, rotation axis...).
// Entries are validated against the conjugate transpose on checked
// construction; internal code that produces Hermitian results by
// construction uses the unchecked path.
class HermitianOp {
  public:
    HermitianOp() = default;
    static HermitianOp checked(Matrix m, double tol = 1e-12);
    static HermitianOp trusted(Matrix m) { return HermitianOp(std::move(m)); }

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }

  private:
    explicit HermitianOp(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

class UnitaryOp {
  public:
    UnitaryOp() = default;
    static UnitaryOp checked(Matrix m, double tol_scale = 1e-10);
    static UnitaryOp trusted(Matrix m) { return UnitaryOp(std::move(m)); }

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }

  private:
    explicit UnitaryOp(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

// exp(-i s H) for Hermitian H. Closed form for d = 2, eigendecomposition
// otherwise.
UnitaryOp mat_exp(const HermitianOp& h, double s);

// Raw-matrix variant used by the propagation kernels.
Matrix mat_exp(const Matrix& hermitian, double s);

// Hermitian eta with exp(-i eta) = U. Eigenphases are principal in
// (-pi, pi]; with a hint, each eigenphase branch is shifted by the
// multiple of 2*pi closest to the hint's component along that
// eigenvector. Degenerate eigenvalue clusters are re-diagonalized
// against the hint so the branch choice stays well defined through
// U = -I and its neighborhood.
HermitianOp mat_log_unitary(const UnitaryOp& u,
                            const std::optional<HermitianOp>& branch_hint = std::nullopt);

// Tr(eta^dag sigma); real for Hermitian inputs.
double pauli_project(const HermitianOp& eta, const HermitianOp& sigma);

double frobenius_norm(const HermitianOp& m);
double frobenius_norm(const Matrix& m);

// |Tr(U^dag V)| / d. The modulus discards a global phase.
double gate_fidelity(const UnitaryOp& u, const UnitaryOp& v);
double gate_fidelity(const Matrix& u, const Matrix& v);

// Pauli matrices.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

}  // namespace qcrl
