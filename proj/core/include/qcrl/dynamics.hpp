#pragma once

#include <string>
#include <vector>

#include "qcrl/operators.hpp"
#include "qcrl/pulses.hpp"

namespace qcrl {

struct ControlTerm {
    HermitianOp op;
    PulseBasis basis;
};

struct NoiseTerm {
    HermitianOp op;
    std::string label;
};

// H(t) = H_s + sum_k Omega_k(t; A_k) H_c,k + sum_j delta_j H_n,j
struct SystemModel {
    Eigen::Index dim = 0;
    HermitianOp drift;
    std::vector<ControlTerm> controls;
    std::vector<NoiseTerm> noises;

    double gate_time() const { return controls.front().basis.gate_time; }
    void validate() const;  // throws ContractViolation
};

// Noiseless propagator sampled on a uniform grid. Unitaries are stored at
// the grid points and at the step midpoints (the midpoints feed the
// interaction-picture quadratures at the same discretization order as the
// stepper).
class Trajectory {
  public:
    Trajectory() = default;

    Eigen::Index dim() const { return dim_; }
    std::size_t steps() const { return steps_; }
    double gate_time() const { return gate_time_; }
    double dt() const { return gate_time_ / static_cast<double>(steps_); }
    double grid_time(std::size_t k) const { return dt() * static_cast<double>(k); }

    // U_sc at grid point k, k in [0, steps].
    Eigen::Map<const Matrix> unitary_at(std::size_t k) const;
    // U_sc at the midpoint of step k, k in [0, steps).
    Eigen::Map<const Matrix> midpoint_unitary_at(std::size_t k) const;

    UnitaryOp final_unitary() const { return UnitaryOp::trusted(unitary_at(steps_)); }

    const std::vector<ParamVector>& params_used() const { return a_used_; }

    // Reshapes the internal buffers; contents become undefined.
    void reset(Eigen::Index dim, std::size_t steps, double gate_time);

    Complex* grid_data() { return grid_.data(); }
    Complex* mid_data() { return mid_.data(); }
    const Complex* grid_data() const { return grid_.data(); }
    const Complex* mid_data() const { return mid_.data(); }
    void set_params_used(std::vector<ParamVector> a) { a_used_ = std::move(a); }

  private:
    Eigen::Index dim_ = 0;
    std::size_t steps_ = 0;
    double gate_time_ = 0.0;
    std::vector<Complex> grid_;  // (steps+1) * dim^2, column-major blocks
    std::vector<Complex> mid_;   // steps * dim^2
    std::vector<ParamVector> a_used_;
};

// Second-order midpoint stepping:
//   U(t_{k+1}) = exp(-i H(t_k + dt/2) dt) U(t_k).
Trajectory propagate(const SystemModel& model, const std::vector<ParamVector>& a,
                     std::size_t steps);

// Same, reusing the buffers of `out`.
void propagate_into(Trajectory& out, const SystemModel& model,
                    const std::vector<ParamVector>& a, std::size_t steps);

// Final-time propagator under H_s + H_c + sum_j delta_j H_n,j.
UnitaryOp noisy_propagate(const SystemModel& model, const std::vector<ParamVector>& a,
                          const std::vector<double>& delta, std::size_t steps);

// Interaction-picture noise samples U_sc^dag(t) H_n0 U_sc(t) at step midpoints.
std::vector<HermitianOp> interaction_noise(const Trajectory& traj, const HermitianOp& h_n0);

// Time-ordered product of exp(-i delta H_n^sc(midpoint) dt) over the grid.
UnitaryOp error_propagator(const Trajectory& traj, const HermitianOp& h_n0, double delta);

struct RotationAngles {
    double theta = 0.0;                 // along the desired axis
    std::vector<double> undesired;      // along each undesired axis
    HermitianOp generator;              // eta, for use as the next branch hint
};

// eta = mat_log_unitary(U, hint); theta = Tr(eta^dag sigma). With the
// desired axis normalized to Tr(sigma^2) = 2, a positive-area pulse on a
// single commuting control yields theta equal to the pulse area.
RotationAngles rotation_angles(const UnitaryOp& u_final, const HermitianOp& desired,
                               const std::vector<HermitianOp>& undesired,
                               const std::optional<HermitianOp>& branch_hint = std::nullopt);

}  // namespace qcrl
