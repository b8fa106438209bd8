#include "qcrl/gradients.hpp"

#include <cmath>
#include <limits>

#include "qcrl/errors.hpp"

namespace qcrl {

ScalarFunctional ScalarFunctional::theta(HermitianOp sigma) {
    ScalarFunctional f;
    f.kind = Kind::Theta;
    f.axis = std::move(sigma);
    return f;
}

ScalarFunctional ScalarFunctional::undesired(HermitianOp varsigma) {
    ScalarFunctional f;
    f.kind = Kind::Undesired;
    f.axis = std::move(varsigma);
    return f;
}

ScalarFunctional ScalarFunctional::s1_of(std::size_t noise_index) {
    ScalarFunctional f;
    f.kind = Kind::S1;
    f.noise_index = noise_index;
    return f;
}

ScalarFunctional ScalarFunctional::s2_of(std::size_t noise_index) {
    ScalarFunctional f;
    f.kind = Kind::S2;
    f.noise_index = noise_index;
    return f;
}

ScalarFunctional ScalarFunctional::fidelity(UnitaryOp g) {
    ScalarFunctional f;
    f.kind = Kind::Fidelity;
    f.target = std::move(g);
    return f;
}

ScalarFunctional ScalarFunctional::power() {
    ScalarFunctional f;
    f.kind = Kind::Power;
    return f;
}

ParamVector flatten_params(const std::vector<ParamVector>& a) {
    ParamVector flat;
    for (const auto& v : a) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
}

std::vector<ParamVector> unflatten_params(const SystemModel& model, const ParamVector& flat) {
    std::vector<ParamVector> a;
    std::size_t pos = 0;
    for (const auto& c : model.controls) {
        const std::size_t n = c.basis.param_count();
        if (pos + n > flat.size()) {
            throw ContractViolation("unflatten_params: flat vector too short");
        }
        a.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                       flat.begin() + static_cast<std::ptrdiff_t>(pos + n));
        pos += n;
    }
    if (pos != flat.size()) throw ContractViolation("unflatten_params: flat vector too long");
    return a;
}

namespace {

void validate_fns(const std::vector<ScalarFunctional>& fns, const SystemModel& model) {
    for (const auto& fn : fns) {
        switch (fn.kind) {
            case ScalarFunctional::Kind::Theta:
            case ScalarFunctional::Kind::Undesired:
                if (fn.axis.dim() != model.dim) {
                    throw ContractViolation("ScalarFunctional: axis dimension mismatch");
                }
                break;
            case ScalarFunctional::Kind::S1:
            case ScalarFunctional::Kind::S2:
                if (fn.noise_index >= model.noises.size()) {
                    throw ContractViolation("ScalarFunctional: noise index out of range");
                }
                break;
            case ScalarFunctional::Kind::Fidelity:
                if (fn.target.dim() != model.dim) {
                    throw ContractViolation("ScalarFunctional: target dimension mismatch");
                }
                break;
            case ScalarFunctional::Kind::Power:
                break;
        }
    }
}

// Shared per-trajectory scratch so repeated FD evaluations reuse the same
// Magnus results and logarithm.
struct EvalScratch {
    Trajectory traj;
};

}  // namespace

// Composite Simpson over [0, T]; the bases are smooth, so 1024 panels are
// far past the accuracy of everything downstream.
double control_power(const SystemModel& model, const std::vector<ParamVector>& a) {
    const std::size_t panels = 1024;
    const double T = model.controls.front().basis.gate_time;
    const double h = T / static_cast<double>(2 * panels);
    double sum = 0.0;
    for (std::size_t i = 0; i <= 2 * panels; ++i) {
        const double t = h * static_cast<double>(i);
        double sq = 0.0;
        for (std::size_t k = 0; k < model.controls.size(); ++k) {
            const double om = eval_pulse(model.controls[k].basis, a[k], t);
            sq += om * om;
        }
        const double w = (i == 0 || i == 2 * panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * sq;
    }
    return sum * h / 3.0;
}

namespace {

std::vector<double> eval_on_traj(const std::vector<ScalarFunctional>& fns,
                                 const SystemModel& model,
                                 const std::vector<ParamVector>& a, const Trajectory& traj,
                                 const std::optional<HermitianOp>& hint) {
    bool need_log = false;
    for (const auto& fn : fns) {
        need_log = need_log || fn.kind == ScalarFunctional::Kind::Theta ||
                   fn.kind == ScalarFunctional::Kind::Undesired;
    }
    HermitianOp eta;
    if (need_log) eta = mat_log_unitary(traj.final_unitary(), hint);

    // Cache S1/S2 per noise index (a bundle typically repeats them).
    std::vector<double> s1_cache(model.noises.size(),
                                 std::numeric_limits<double>::quiet_NaN());
    std::vector<double> s2_cache(model.noises.size(),
                                 std::numeric_limits<double>::quiet_NaN());

    std::vector<double> out;
    out.reserve(fns.size());
    for (const auto& fn : fns) {
        switch (fn.kind) {
            case ScalarFunctional::Kind::Theta:
            case ScalarFunctional::Kind::Undesired:
                out.push_back(pauli_project(eta, fn.axis));
                break;
            case ScalarFunctional::Kind::S1:
                if (std::isnan(s1_cache[fn.noise_index])) {
                    s1_cache[fn.noise_index] = s1(traj, model.noises[fn.noise_index].op).s1;
                }
                out.push_back(s1_cache[fn.noise_index]);
                break;
            case ScalarFunctional::Kind::S2:
                if (std::isnan(s2_cache[fn.noise_index])) {
                    s2_cache[fn.noise_index] = s2(traj, model.noises[fn.noise_index].op).s2;
                }
                out.push_back(s2_cache[fn.noise_index]);
                break;
            case ScalarFunctional::Kind::Fidelity:
                out.push_back(gate_fidelity(fn.target.matrix(), traj.final_unitary().matrix()));
                break;
            case ScalarFunctional::Kind::Power:
                out.push_back(control_power(model, a));
                break;
        }
    }
    return out;
}

}  // namespace

std::vector<double> eval_functionals(const std::vector<ScalarFunctional>& fns,
                                     const SystemModel& model,
                                     const std::vector<ParamVector>& a,
                                     std::size_t steps,
                                     const std::optional<HermitianOp>& branch_hint) {
    validate_fns(fns, model);
    const Trajectory traj = propagate(model, a, steps);
    return eval_on_traj(fns, model, a, traj, branch_hint);
}

std::vector<ParamVector> grad_bundle(const std::vector<ScalarFunctional>& fns,
                                     const SystemModel& model,
                                     const std::vector<ParamVector>& a,
                                     const GradOptions& opt) {
    validate_fns(fns, model);
    model.validate();

    // Fix the generator branch at the base point so finite differences of
    // the angle functionals never straddle a branch jump.
    std::optional<HermitianOp> hint = opt.branch_hint;
    {
        bool need_log = false;
        for (const auto& fn : fns) {
            need_log = need_log || fn.kind == ScalarFunctional::Kind::Theta ||
                       fn.kind == ScalarFunctional::Kind::Undesired;
        }
        if (need_log && !hint) {
            const Trajectory base = propagate(model, a, opt.steps);
            hint = mat_log_unitary(base.final_unitary(), std::nullopt);
        }
    }

    ParamVector flat = flatten_params(a);
    const std::size_t n = flat.size();
    std::vector<ParamVector> rows(fns.size(), ParamVector(n, 0.0));

    Trajectory traj;
    auto eval_at = [&](const ParamVector& f) {
        const auto ap = unflatten_params(model, f);
        propagate_into(traj, model, ap, opt.steps);
        return eval_on_traj(fns, model, ap, traj, hint);
    };

    const double h = opt.fd_step;
    for (std::size_t j = 0; j < n; ++j) {
        const double base = flat[j];
        flat[j] = base + h;
        const auto fp = eval_at(flat);
        flat[j] = base - h;
        const auto fm = eval_at(flat);
        flat[j] = base + 0.5 * h;
        const auto fph = eval_at(flat);
        flat[j] = base - 0.5 * h;
        const auto fmh = eval_at(flat);
        flat[j] = base;
        for (std::size_t i = 0; i < fns.size(); ++i) {
            const double d1 = (fp[i] - fm[i]) / (2.0 * h);
            const double d2 = (fph[i] - fmh[i]) / h;
            rows[i][j] = (4.0 * d2 - d1) / 3.0;
        }
    }
    return rows;
}

ParamVector grad(const ScalarFunctional& fn, const SystemModel& model,
                 const std::vector<ParamVector>& a, const GradOptions& opt) {
    return grad_bundle({fn}, model, a, opt).front();
}

}  // namespace qcrl
