#include "qcrl/dynamics.hpp"

#include <cmath>

#include "dim_dispatch.hpp"
#include "qcrl/errors.hpp"

namespace qcrl {

using detail::Mat;

void SystemModel::validate() const {
    if (dim < 1) throw ContractViolation("SystemModel: dim must be positive");
    if (controls.empty()) throw ContractViolation("SystemModel: at least one control required");
    if (drift.dim() != dim) throw ContractViolation("SystemModel: drift dimension mismatch");
    for (const auto& c : controls) {
        if (c.op.dim() != dim) throw ContractViolation("SystemModel: control dimension mismatch");
        if (c.basis.gate_time != controls.front().basis.gate_time) {
            throw ContractViolation("SystemModel: controls must share one gate time");
        }
    }
    for (const auto& n : noises) {
        if (n.op.dim() != dim) throw ContractViolation("SystemModel: noise dimension mismatch");
    }
}

void Trajectory::reset(Eigen::Index dim, std::size_t steps, double gate_time) {
    dim_ = dim;
    steps_ = steps;
    gate_time_ = gate_time;
    grid_.resize((steps + 1) * static_cast<std::size_t>(dim * dim));
    mid_.resize(steps * static_cast<std::size_t>(dim * dim));
}

Eigen::Map<const Matrix> Trajectory::unitary_at(std::size_t k) const {
    return {grid_.data() + k * static_cast<std::size_t>(dim_ * dim_), dim_, dim_};
}

Eigen::Map<const Matrix> Trajectory::midpoint_unitary_at(std::size_t k) const {
    return {mid_.data() + k * static_cast<std::size_t>(dim_ * dim_), dim_, dim_};
}

namespace {

void check_params(const SystemModel& model, const std::vector<ParamVector>& a) {
    if (a.size() != model.controls.size()) {
        throw ContractViolation("propagate: one parameter vector per control required");
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].size() != model.controls[k].basis.param_count()) {
            throw ContractViolation("propagate: parameter vector length mismatch");
        }
    }
}

template <int N>
struct ModelOps {
    Mat<N> drift;
    std::vector<Mat<N>> controls;

    ModelOps(const SystemModel& model, const std::vector<double>* delta) {
        drift = model.drift.matrix();
        if (delta) {
            for (std::size_t j = 0; j < model.noises.size(); ++j) {
                drift += (*delta)[j] * model.noises[j].op.matrix();
            }
        }
        controls.reserve(model.controls.size());
        for (const auto& c : model.controls) controls.push_back(c.op.matrix());
    }

    void hamiltonian(const SystemModel& model, const std::vector<ParamVector>& a, double t,
                     Mat<N>& h) const {
        h = drift;
        for (std::size_t k = 0; k < controls.size(); ++k) {
            h += eval_pulse(model.controls[k].basis, a[k], t) * controls[k];
        }
    }
};

template <int N>
void propagate_impl(Trajectory& out, const SystemModel& model,
                    const std::vector<ParamVector>& a, std::size_t steps) {
    const Eigen::Index d = model.dim;
    const double T = model.gate_time();
    const double dt = T / static_cast<double>(steps);
    out.reset(d, steps, T);

    ModelOps<N> ops(model, nullptr);
    Mat<N> h(d, d), e(d, d), e_half(d, d), u(d, d), u_mid(d, d);
    u.setIdentity();

    const auto dd = static_cast<std::size_t>(d * d);
    Eigen::Map<Mat<N>>(out.grid_data(), d, d) = u;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * dt;
        ops.hamiltonian(model, a, t_mid, h);
        detail::expm_herm<N>(h, 0.5 * dt, e_half);
        e.noalias() = e_half * e_half;
        u_mid.noalias() = e_half * u;
        Eigen::Map<Mat<N>>(out.mid_data() + k * dd, d, d) = u_mid;
        u_mid.noalias() = e * u;  // reuse as scratch for the next grid point
        u = u_mid;
        Eigen::Map<Mat<N>>(out.grid_data() + (k + 1) * dd, d, d) = u;
    }
    out.set_params_used(a);
}

template <int N>
Matrix noisy_final_impl(const SystemModel& model, const std::vector<ParamVector>& a,
                        const std::vector<double>& delta, std::size_t steps) {
    const Eigen::Index d = model.dim;
    const double dt = model.gate_time() / static_cast<double>(steps);
    ModelOps<N> ops(model, &delta);
    Mat<N> h(d, d), e(d, d), u(d, d), scratch(d, d);
    u.setIdentity();
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * dt;
        ops.hamiltonian(model, a, t_mid, h);
        detail::expm_herm<N>(h, dt, e);
        scratch.noalias() = e * u;
        u = scratch;
    }
    return u;
}

}  // namespace

void propagate_into(Trajectory& out, const SystemModel& model,
                    const std::vector<ParamVector>& a, std::size_t steps) {
    model.validate();
    check_params(model, a);
    if (steps < 16) throw ContractViolation("propagate: at least 16 steps required");
    detail::dispatch_dim(model.dim, [&](auto tag) {
        propagate_impl<decltype(tag)::value>(out, model, a, steps);
    });
}

Trajectory propagate(const SystemModel& model, const std::vector<ParamVector>& a,
                     std::size_t steps) {
    Trajectory traj;
    propagate_into(traj, model, a, steps);
    return traj;
}

UnitaryOp noisy_propagate(const SystemModel& model, const std::vector<ParamVector>& a,
                          const std::vector<double>& delta, std::size_t steps) {
    model.validate();
    check_params(model, a);
    if (delta.size() != model.noises.size()) {
        throw ContractViolation("noisy_propagate: one delta per noise term required");
    }
    if (steps < 16) throw ContractViolation("noisy_propagate: at least 16 steps required");
    Matrix u = detail::dispatch_dim(model.dim, [&](auto tag) -> Matrix {
        return noisy_final_impl<decltype(tag)::value>(model, a, delta, steps);
    });
    return UnitaryOp::trusted(std::move(u));
}

std::vector<HermitianOp> interaction_noise(const Trajectory& traj, const HermitianOp& h_n0) {
    if (h_n0.dim() != traj.dim()) {
        throw DimensionMismatch("interaction_noise: dimension mismatch");
    }
    std::vector<HermitianOp> samples;
    samples.reserve(traj.steps());
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        const auto u = traj.midpoint_unitary_at(k);
        Matrix s = u.adjoint() * h_n0.matrix() * u;
        s = 0.5 * (s + s.adjoint().eval());
        samples.push_back(HermitianOp::trusted(std::move(s)));
    }
    return samples;
}

UnitaryOp error_propagator(const Trajectory& traj, const HermitianOp& h_n0, double delta) {
    if (h_n0.dim() != traj.dim()) {
        throw DimensionMismatch("error_propagator: dimension mismatch");
    }
    const Eigen::Index d = traj.dim();
    const double dt = traj.dt();
    Matrix u = detail::dispatch_dim(d, [&](auto tag) -> Matrix {
        constexpr int N = decltype(tag)::value;
        const auto dd = static_cast<std::size_t>(d * d);
        Mat<N> hn = h_n0.matrix();
        Mat<N> ht(d, d), e(d, d), acc(d, d), scratch(d, d);
        acc.setIdentity();
        for (std::size_t k = 0; k < traj.steps(); ++k) {
            Eigen::Map<const Mat<N>> um(traj.mid_data() + k * dd, d, d);
            ht.noalias() = um.adjoint() * hn * um;
            detail::expm_herm<N>(ht, delta * dt, e);
            scratch.noalias() = e * acc;
            acc = scratch;
        }
        return acc;
    });
    return UnitaryOp::trusted(std::move(u));
}

RotationAngles rotation_angles(const UnitaryOp& u_final, const HermitianOp& desired,
                               const std::vector<HermitianOp>& undesired,
                               const std::optional<HermitianOp>& branch_hint) {
    RotationAngles out;
    out.generator = mat_log_unitary(u_final, branch_hint);
    out.theta = pauli_project(out.generator, desired);
    out.undesired.reserve(undesired.size());
    for (const auto& axis : undesired) {
        out.undesired.push_back(pauli_project(out.generator, axis));
    }
    return out;
}

}  // namespace qcrl
