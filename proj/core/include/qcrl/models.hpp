#pragma once

#include <string>
#include <vector>

#include "qcrl/dynamics.hpp"

namespace qcrl {

// Assembled model plus the rotation axes used for angle extraction. The
// desired axis is normalized to Tr(sigma^2) = 2 so the extracted angle of a
// positive-area pulse equals the pulse area.
struct GatePreset {
    std::string name;
    SystemModel model;
    HermitianOp desired;
    std::vector<HermitianOp> undesired;
};

// On-resonance single qubit: H_s = 0, controls (Omega_k/2) sigma_axis,
// noises delta_j sigma_axis. Axis characters in {'x', 'y', 'z'}.
SystemModel build_single_qubit(const std::vector<char>& control_axes,
                               const std::vector<char>& noise_axes, const PulseBasis& basis);

// Two-qubit XY exchange: control (Omega/2)(sx sx + sy sy)/2, noise
// (delta/2)(sz I - I sz), d = 4. Basis order |00>, |01>, |10>, |11>.
SystemModel build_two_qubit_xy(const PulseBasis& basis);

// Subspace generators on span{|01>, |10>}: X_sub = |01><10| + |10><01|,
// Z_sub = |01><01| - |10><10|.
Matrix two_qubit_x_sub();
Matrix two_qubit_z_sub();

// Named presets: sq_x_z, sq_xy_xyz, tq_xy_detuning.
GatePreset preset(const std::string& name, const PulseBasis& basis);

// Default basis of the reference runs: windowed Fourier, sin window, phase
// form, 4 harmonics (9 parameters), T in ns.
PulseBasis default_basis(double gate_time = 50.0);

}  // namespace qcrl
