#pragma once

#include <cstdint>
#include <vector>

#include "qcrl/dynamics.hpp"

namespace qcrl {

// Norm used for all susceptibilities. Frobenius is the default; spectral is
// kept for calibration runs against published values.
enum class NormKind { Frobenius, Spectral };

NormKind susceptibility_norm();
void set_susceptibility_norm(NormKind kind);

double op_norm(const Matrix& m, NormKind kind);

struct S1Result {
    double s1 = 0.0;
    HermitianOp m1;  // first Magnus integral at unit noise
};

struct S2Result {
    double s2 = 0.0;
    HermitianOp i_m2;  // i * M2 (M2 itself is anti-Hermitian)
};

// M1 = integral of U_sc^dag H_n0 U_sc over [0, T], midpoint quadrature on
// the trajectory grid; S1 = ||M1||.
S1Result s1(const Trajectory& traj, const HermitianOp& h_n0);

// M2 = integral of [H~(t), integral of H~ up to t] with H~ the
// interaction-picture noise; nested integral by cumulative midpoint sums.
S2Result s2(const Trajectory& traj, const HermitianOp& h_n0);

struct RobustnessValue {
    double value = 0.0;
    bool unbounded = false;  // Sn == 0
};

// R^n = log10(T) - log10(Sn)/n.
RobustnessValue robustness_order_n(double gate_time, int order, double sn);

struct DerivativeCheck {
    double s1_d = 0.0;     // finite-difference dU_n^sc/d delta norm
    double s1_m = 0.0;     // Magnus value from s1()
    double rel_gap = 0.0;  // |s1_d - s1_m| / max(s1_m, eps)
    double s2_d = 0.0;     // second-derivative norm (central)
};

DerivativeCheck s1_derivative_check(const SystemModel& model, const std::vector<ParamVector>& a,
                                    const HermitianOp& h_n0, double fd_step,
                                    std::size_t steps = 1024);

struct NoiseLaw {
    enum class Kind { Fixed, Uniform, Gaussian } kind = Kind::Fixed;
    double value = 0.0;  // delta, half-width b, or std-dev s
};

struct NoiseDistribution {
    std::vector<NoiseLaw> laws;  // one per noise term
    std::size_t samples = 1;
    std::uint64_t seed = 0;
};

// Monte-Carlo mean of F(U_sc(T), U_scn(T; delta)) over seeded draws.
// Per-draw seeds are derived from (seed, draw index); the reduction is an
// indexed sum, so results are bitwise reproducible.
double integral_robustness(const SystemModel& model, const std::vector<ParamVector>& a,
                           const NoiseDistribution& dist, std::size_t steps = 1024);

struct QeedCurve {
    std::vector<double> t;  // grid times, r(0) = 0
    std::vector<double> rx, ry, rz;
};

// Error curve r_sigma(t): cumulative first Magnus integral projected on the
// Pauli axes (d = 2, traceless noise only).
QeedCurve qeed_curve(const Trajectory& traj, const HermitianOp& h_n0);

struct MultiSourceS1 {
    std::vector<double> per_source;
    double combined = 0.0;  // S1 of the summed noise operator
    double sum = 0.0;       // triangle-inequality bound
};

MultiSourceS1 multi_source_s1(const Trajectory& traj, const std::vector<HermitianOp>& noises);

}  // namespace qcrl
