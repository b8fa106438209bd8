#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qcrl/dynamics.hpp"
#include "qcrl/robustness.hpp"

namespace qcrl {

// Scalar functionals of the flat parameter vector (all control parameter
// vectors concatenated in model order).
struct ScalarFunctional {
    enum class Kind { Theta, Undesired, S1, S2, Fidelity, Power };
    Kind kind = Kind::Theta;
    HermitianOp axis;             // sigma / varsigma_j for Theta / Undesired
    std::size_t noise_index = 0;  // into model.noises for S1 / S2
    UnitaryOp target;             // G for Fidelity

    static ScalarFunctional theta(HermitianOp sigma);
    static ScalarFunctional undesired(HermitianOp varsigma);
    static ScalarFunctional s1_of(std::size_t noise_index);
    static ScalarFunctional s2_of(std::size_t noise_index);
    static ScalarFunctional fidelity(UnitaryOp g);
    // Control power: integral over [0, T] of the summed squared control
    // amplitudes. Constraining it pins the pulse energy along a family.
    static ScalarFunctional power();
};

struct GradOptions {
    std::size_t steps = 1024;
    double fd_step = 1e-4;  // Richardson pair (h, h/2)
    // Generator branch hint for the angle functionals; gradients are taken
    // on the branch this hint selects.
    std::optional<HermitianOp> branch_hint;
};

// Integral over [0, T] of the summed squared control amplitudes
// (the Kind::Power functional), composite Simpson quadrature.
double control_power(const SystemModel& model, const std::vector<ParamVector>& a);

// Flat-vector helpers: parameters are concatenated per control.
ParamVector flatten_params(const std::vector<ParamVector>& a);
std::vector<ParamVector> unflatten_params(const SystemModel& model, const ParamVector& flat);

// Values of all functionals at A, sharing one trajectory.
std::vector<double> eval_functionals(const std::vector<ScalarFunctional>& fns,
                                     const SystemModel& model,
                                     const std::vector<ParamVector>& a,
                                     std::size_t steps,
                                     const std::optional<HermitianOp>& branch_hint);

// Gradient of one functional with respect to the flat parameter vector.
// Richardson-extrapolated central differences; perturbed trajectories are
// shared across functionals in the bundle form.
ParamVector grad(const ScalarFunctional& fn, const SystemModel& model,
                 const std::vector<ParamVector>& a, const GradOptions& opt = {});

// Row i is the gradient of fns[i]; one pass of perturbed trajectories.
std::vector<ParamVector> grad_bundle(const std::vector<ScalarFunctional>& fns,
                                     const SystemModel& model,
                                     const std::vector<ParamVector>& a,
                                     const GradOptions& opt = {});

}  // namespace qcrl
