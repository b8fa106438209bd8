#include "qcrl/models.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include "qcrl/errors.hpp"

namespace qcrl {

namespace {

Matrix pauli(char axis) {
    switch (axis) {
        case 'x':
            return pauli_x();
        case 'y':
            return pauli_y();
        case 'z':
            return pauli_z();
        default:
            throw ContractViolation("pauli axis must be one of x, y, z");
    }
}

}  // namespace

SystemModel build_single_qubit(const std::vector<char>& control_axes,
                               const std::vector<char>& noise_axes, const PulseBasis& basis) {
    if (control_axes.empty()) {
        throw ContractViolation("build_single_qubit: at least one control axis");
    }
    if (noise_axes.empty()) {
        throw ContractViolation("build_single_qubit: at least one noise axis");
    }
    SystemModel m;
    m.dim = 2;
    m.drift = HermitianOp::trusted(Matrix::Zero(2, 2));
    for (char ax : control_axes) {
        m.controls.push_back({HermitianOp::trusted(0.5 * pauli(ax)), basis});
    }
    for (char ax : noise_axes) {
        m.noises.push_back({HermitianOp::trusted(pauli(ax)), std::string(1, ax)});
    }
    m.validate();
    return m;
}

Matrix two_qubit_x_sub() {
    const Matrix sx = pauli_x(), sy = pauli_y();
    return 0.5 * (Eigen::kroneckerProduct(sx, sx) + Eigen::kroneckerProduct(sy, sy));
}

Matrix two_qubit_z_sub() {
    const Matrix sz = pauli_z();
    const Matrix id = Matrix::Identity(2, 2);
    return 0.5 * (Eigen::kroneckerProduct(sz, id) - Eigen::kroneckerProduct(id, sz));
}

SystemModel build_two_qubit_xy(const PulseBasis& basis) {
    SystemModel m;
    m.dim = 4;
    m.drift = HermitianOp::trusted(Matrix::Zero(4, 4));
    m.controls.push_back({HermitianOp::trusted(0.5 * two_qubit_x_sub()), basis});
    m.noises.push_back({HermitianOp::trusted(two_qubit_z_sub()), "detuning"});
    m.validate();
    return m;
}

PulseBasis default_basis(double gate_time) {
    PulseBasis b;
    WindowedFourier wf;
    wf.harmonics = 4;
    wf.window = FourierWindow::Sin;
    wf.phase_form = true;
    b.kind = wf;
    b.gate_time = gate_time;
    return b;
}

GatePreset preset(const std::string& name, const PulseBasis& basis) {
    GatePreset p;
    p.name = name;
    if (name == "sq_x_z") {
        p.model = build_single_qubit({'x'}, {'z'}, basis);
        p.desired = HermitianOp::trusted(pauli_x());
        p.undesired = {HermitianOp::trusted(pauli_y()), HermitianOp::trusted(pauli_z())};
    } else if (name == "sq_xy_xyz") {
        p.model = build_single_qubit({'x', 'y'}, {'x', 'y', 'z'}, basis);
        p.desired = HermitianOp::trusted(pauli_x());
        p.undesired = {HermitianOp::trusted(pauli_y()), HermitianOp::trusted(pauli_z())};
    } else if (name == "tq_xy_detuning") {
        p.model = build_two_qubit_xy(basis);
        p.desired = HermitianOp::trusted(two_qubit_x_sub());
        const Matrix sx = pauli_x(), sy = pauli_y();
        const Matrix y_sub =
            0.5 * (Eigen::kroneckerProduct(sy, sx) - Eigen::kroneckerProduct(sx, sy));
        p.undesired = {HermitianOp::trusted(y_sub), HermitianOp::trusted(two_qubit_z_sub())};
    } else {
        throw ContractViolation("unknown model preset: " + name);
    }
    return p;
}

}  // namespace qcrl
