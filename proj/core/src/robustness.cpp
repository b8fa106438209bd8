#include "qcrl/robustness.hpp"

#include <cmath>
#include <limits>

#include "dim_dispatch.hpp"
#include "qcrl/errors.hpp"
#include "qcrl/rng.hpp"

namespace qcrl {

using detail::Mat;

namespace {
NormKind g_norm = NormKind::Frobenius;
}

NormKind susceptibility_norm() { return g_norm; }
void set_susceptibility_norm(NormKind kind) { g_norm = kind; }

double op_norm(const Matrix& m, NormKind kind) {
    if (kind == NormKind::Frobenius) return m.norm();
    return m.jacobiSvd().singularValues()(0);
}

double Rng::normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

template <int N>
Matrix magnus1_impl(const Trajectory& traj, const Matrix& hn0) {
    const Eigen::Index d = traj.dim();
    const auto dd = static_cast<std::size_t>(d * d);
    const double dt = traj.dt();
    Mat<N> hn = hn0;
    Mat<N> acc(d, d), ht(d, d);
    acc.setZero();
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        Eigen::Map<const Mat<N>> um(traj.mid_data() + k * dd, d, d);
        ht.noalias() = um.adjoint() * hn * um;
        acc += ht;
    }
    return Matrix(dt * acc);
}

template <int N>
Matrix magnus2_impl(const Trajectory& traj, const Matrix& hn0) {
    const Eigen::Index d = traj.dim();
    const auto dd = static_cast<std::size_t>(d * d);
    const double dt = traj.dt();
    Mat<N> hn = hn0;
    Mat<N> acc(d, d), ht(d, d), cum(d, d), c(d, d), comm(d, d);
    acc.setZero();
    cum.setZero();  // integral of H~ up to the previous grid point
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        Eigen::Map<const Mat<N>> um(traj.mid_data() + k * dd, d, d);
        ht.noalias() = um.adjoint() * hn * um;
        c = dt * cum + (0.5 * dt) * ht;  // integral up to this midpoint
        comm.noalias() = ht * c;
        comm.noalias() -= c * ht;
        acc += comm;
        cum += ht;
    }
    return Matrix(dt * acc);
}

}  // namespace

S1Result s1(const Trajectory& traj, const HermitianOp& h_n0) {
    if (h_n0.dim() != traj.dim()) throw DimensionMismatch("s1: dimension mismatch");
    Matrix m1 = detail::dispatch_dim(traj.dim(), [&](auto tag) {
        return magnus1_impl<decltype(tag)::value>(traj, h_n0.matrix());
    });
    S1Result out;
    out.s1 = op_norm(m1, g_norm);
    out.m1 = HermitianOp::trusted(std::move(m1));
    return out;
}

S2Result s2(const Trajectory& traj, const HermitianOp& h_n0) {
    if (h_n0.dim() != traj.dim()) throw DimensionMismatch("s2: dimension mismatch");
    Matrix m2 = detail::dispatch_dim(traj.dim(), [&](auto tag) {
        return magnus2_impl<decltype(tag)::value>(traj, h_n0.matrix());
    });
    S2Result out;
    out.s2 = op_norm(m2, g_norm);
    Matrix im2 = Complex(0.0, 1.0) * m2;
    out.i_m2 = HermitianOp::trusted(std::move(im2));
    return out;
}

RobustnessValue robustness_order_n(double gate_time, int order, double sn) {
    if (sn < 0.0) throw ContractViolation("robustness_order_n: Sn must be non-negative");
    RobustnessValue out;
    if (sn == 0.0) {
        out.value = std::numeric_limits<double>::infinity();
        out.unbounded = true;
        return out;
    }
    out.value = std::log10(gate_time) - std::log10(sn) / static_cast<double>(order);
    return out;
}

DerivativeCheck s1_derivative_check(const SystemModel& model, const std::vector<ParamVector>& a,
                                    const HermitianOp& h_n0, double fd_step,
                                    std::size_t steps) {
    if (fd_step < 1e-6 || fd_step > 1e-3) {
        throw ContractViolation("s1_derivative_check: fd step outside [1e-6, 1e-3]");
    }
    const Trajectory traj = propagate(model, a, steps);
    const Matrix up = error_propagator(traj, h_n0, fd_step).matrix();
    const Matrix um = error_propagator(traj, h_n0, -fd_step).matrix();

    DerivativeCheck out;
    out.s1_d = op_norm((up - um) / (2.0 * fd_step), g_norm);
    out.s1_m = s1(traj, h_n0).s1;
    out.rel_gap = std::abs(out.s1_d - out.s1_m) / std::max(out.s1_m, 1e-12);
    const Matrix ident = Matrix::Identity(traj.dim(), traj.dim());
    out.s2_d = op_norm((up - 2.0 * ident + um) / (fd_step * fd_step), g_norm);
    return out;
}

double integral_robustness(const SystemModel& model, const std::vector<ParamVector>& a,
                           const NoiseDistribution& dist, std::size_t steps) {
    model.validate();
    if (dist.laws.size() != model.noises.size()) {
        throw ContractViolation("integral_robustness: one law per noise term required");
    }
    if (dist.samples < 1) throw ContractViolation("integral_robustness: samples must be >= 1");
    for (const auto& law : dist.laws) {
        if (law.kind != NoiseLaw::Kind::Fixed && law.value < 0.0) {
            throw ContractViolation("integral_robustness: negative law parameter");
        }
    }
    const Trajectory traj = propagate(model, a, steps);
    const Matrix u_sc = traj.final_unitary().matrix();

    double sum = 0.0;
    std::vector<double> delta(dist.laws.size(), 0.0);
    for (std::size_t i = 0; i < dist.samples; ++i) {
        Rng rng = Rng::derive(dist.seed, i);
        for (std::size_t j = 0; j < dist.laws.size(); ++j) {
            switch (dist.laws[j].kind) {
                case NoiseLaw::Kind::Fixed:
                    delta[j] = dist.laws[j].value;
                    break;
                case NoiseLaw::Kind::Uniform:
                    delta[j] = rng.uniform(-dist.laws[j].value, dist.laws[j].value);
                    break;
                case NoiseLaw::Kind::Gaussian:
                    delta[j] = dist.laws[j].value * rng.normal();
                    break;
            }
        }
        sum += gate_fidelity(u_sc, noisy_propagate(model, a, delta, steps).matrix());
    }
    return sum / static_cast<double>(dist.samples);
}

QeedCurve qeed_curve(const Trajectory& traj, const HermitianOp& h_n0) {
    if (traj.dim() != 2) throw Unsupported("qeed_curve: only d = 2 supported");
    if (std::abs(std::real(h_n0.matrix().trace())) > 1e-10) {
        throw ContractViolation("qeed_curve: noise operator must be traceless");
    }
    const double dt = traj.dt();
    const std::size_t n = traj.steps();
    QeedCurve curve;
    curve.t.resize(n + 1);
    curve.rx.assign(n + 1, 0.0);
    curve.ry.assign(n + 1, 0.0);
    curve.rz.assign(n + 1, 0.0);
    curve.t[0] = 0.0;
    const Matrix hn = h_n0.matrix();
    double cx = 0.0, cy = 0.0, cz = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto um = traj.midpoint_unitary_at(k);
        const Matrix ht = um.adjoint() * hn * um;
        // r_j += dt * Tr(H~ sigma_j) / 2
        cx += dt * std::real(ht(0, 1) + ht(1, 0)) * 0.5;
        cy += dt * std::imag(ht(1, 0) - ht(0, 1)) * 0.5;
        cz += dt * std::real(ht(0, 0) - ht(1, 1)) * 0.5;
        curve.t[k + 1] = traj.grid_time(k + 1);
        curve.rx[k + 1] = cx;
        curve.ry[k + 1] = cy;
        curve.rz[k + 1] = cz;
    }
    return curve;
}

MultiSourceS1 multi_source_s1(const Trajectory& traj, const std::vector<HermitianOp>& noises) {
    if (noises.empty()) throw ContractViolation("multi_source_s1: empty noise list");
    MultiSourceS1 out;
    Matrix total = Matrix::Zero(traj.dim(), traj.dim());
    for (const auto& hn : noises) {
        out.per_source.push_back(s1(traj, hn).s1);
        out.sum += out.per_source.back();
        total += hn.matrix();
    }
    out.combined = s1(traj, HermitianOp::trusted(std::move(total))).s1;
    return out;
}

}  // namespace qcrl
