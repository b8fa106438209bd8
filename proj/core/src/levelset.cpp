#include "qcrl/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "qcrl/errors.hpp"

namespace qcrl {

namespace {

double dot(const ParamVector& x, const ParamVector& y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

double norm(const ParamVector& x) { return std::sqrt(dot(x, x)); }

void axpy(double c, const ParamVector& x, ParamVector& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

// Minimum-norm x with J x = r for a short wide Jacobian (rows of J in
// `jac`): x = J^T (J J^T)^+ r via Gaussian elimination with partial
// pivoting; near-singular pivots zero their row instead of amplifying it.
ParamVector least_norm_solve(const std::vector<ParamVector>& jac,
                             const std::vector<double>& r) {
    const std::size_t m = jac.size();
    const std::size_t n = m == 0 ? 0 : jac.front().size();
    std::vector<std::vector<double>> g(m, std::vector<double>(m + 1, 0.0));
    double diag_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) g[i][j] = dot(jac[i], jac[j]);
        g[i][m] = r[i];
        diag_max = std::max(diag_max, g[i][i]);
    }
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < m; ++i) {
            if (std::abs(g[i][k]) > std::abs(g[p][k])) p = i;
        }
        std::swap(g[k], g[p]);
        if (std::abs(g[k][k]) < 1e-12 * diag_max) {
            for (auto& x : g[k]) x = 0.0;
            continue;
        }
        for (std::size_t i = k + 1; i < m; ++i) {
            const double f = g[i][k] / g[k][k];
            for (std::size_t j = k; j <= m; ++j) g[i][j] -= f * g[k][j];
        }
    }
    std::vector<double> y(m, 0.0);
    for (std::size_t k = m; k-- > 0;) {
        if (g[k][k] == 0.0) continue;
        double s = g[k][m];
        for (std::size_t j = k + 1; j < m; ++j) s -= g[k][j] * y[j];
        y[k] = s / g[k][k];
    }
    ParamVector x(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) axpy(y[i], jac[i], x);
    return x;
}

}  // namespace

ConstraintSet ConstraintSet::capture(const SystemModel& model,
                                     const std::vector<ParamVector>& a0,
                                     std::vector<ScalarFunctional> fns, std::size_t steps) {
    ConstraintSet set;
    set.targets = eval_functionals(fns, model, a0, steps, std::nullopt);
    set.fns = std::move(fns);
    return set;
}

ParamVector gov_step(const ParamVector& grad_theta,
                     const std::vector<ParamVector>& constraint_grads, double dtheta_ideal,
                     double eps_irr) {
    const std::size_t n = grad_theta.size();
    if (dtheta_ideal == 0.0) throw ContractViolation("gov_step: dtheta_ideal must be nonzero");
    if (eps_irr <= 0.0 || eps_irr >= 1.0) {
        throw ContractViolation("gov_step: eps_irr must be in (0, 1)");
    }
    for (const auto& g : constraint_grads) {
        if (g.size() != n) throw ContractViolation("gov_step: gradient length mismatch");
    }
    if (n < constraint_grads.size() + 2) {
        throw ContractViolation("gov_step: need at least m + 2 parameters");
    }

    // Modified Gram-Schmidt on the constraint gradients; near-dependent
    // vectors are dropped rather than kept as noise directions.
    std::vector<ParamVector> basis;
    for (const auto& g : constraint_grads) {
        const double g0 = norm(g);
        if (g0 == 0.0) continue;
        ParamVector v = g;
        for (const auto& b : basis) axpy(-dot(b, v), b, v);
        const double r = norm(v);
        if (r < 1e-10 * g0) continue;
        for (auto& x : v) x /= r;
        basis.push_back(std::move(v));
    }

    ParamVector d = grad_theta;
    for (const auto& b : basis) axpy(-dot(b, d), b, d);
    // A second sweep keeps the residual orthogonality at round-off level.
    for (const auto& b : basis) axpy(-dot(b, d), b, d);

    const double gnorm = norm(grad_theta);
    if (norm(d) < eps_irr * gnorm) {
        throw IrregularPoint("gov_step: gate gradient lies in the constraint span");
    }
    const double proj = dot(d, grad_theta);
    const double scale = dtheta_ideal / proj;
    for (auto& x : d) x *= scale;
    return d;
}

namespace {

struct StepEval {
    double theta = 0.0;
    HermitianOp eta;
    std::vector<double> cons;
    std::vector<double> s1_all;
    std::vector<double> s2_cons;
    std::vector<double> undesired;
};

struct TraversalWorkspace {
    const SystemModel& model;
    const HermitianOp& desired;
    const ConstraintSet& constraints;
    const TraversalConfig& cfg;
    std::vector<ScalarFunctional> all_fns;   // theta first, then constraints
    std::vector<std::size_t> s2_noises;      // noise indices with an S2 constraint
    std::vector<const HermitianOp*> und_axes;
    Trajectory traj;

    TraversalWorkspace(const SystemModel& m, const HermitianOp& sigma, const ConstraintSet& c,
                       const TraversalConfig& cf)
        : model(m), desired(sigma), constraints(c), cfg(cf) {
        all_fns.push_back(ScalarFunctional::theta(sigma));
        for (const auto& fn : c.fns) {
            all_fns.push_back(fn);
            if (fn.kind == ScalarFunctional::Kind::S2) {
                if (std::find(s2_noises.begin(), s2_noises.end(), fn.noise_index) ==
                    s2_noises.end()) {
                    s2_noises.push_back(fn.noise_index);
                }
            }
            if (fn.kind == ScalarFunctional::Kind::Undesired) und_axes.push_back(&fn.axis);
        }
    }

    StepEval evaluate(const std::vector<ParamVector>& a,
                      const std::optional<HermitianOp>& hint) {
        propagate_into(traj, model, a, cfg.steps);
        StepEval ev;
        ev.eta = mat_log_unitary(traj.final_unitary(), hint);
        ev.theta = pauli_project(ev.eta, desired);
        for (const auto& nz : model.noises) ev.s1_all.push_back(s1(traj, nz.op).s1);
        for (std::size_t j : s2_noises) ev.s2_cons.push_back(s2(traj, model.noises[j].op).s2);
        for (const auto* axis : und_axes) ev.undesired.push_back(pauli_project(ev.eta, *axis));
        for (const auto& fn : constraints.fns) {
            switch (fn.kind) {
                case ScalarFunctional::Kind::Theta:
                case ScalarFunctional::Kind::Undesired:
                    ev.cons.push_back(pauli_project(ev.eta, fn.axis));
                    break;
                case ScalarFunctional::Kind::S1:
                    ev.cons.push_back(ev.s1_all[fn.noise_index]);
                    break;
                case ScalarFunctional::Kind::S2: {
                    const auto it =
                        std::find(s2_noises.begin(), s2_noises.end(), fn.noise_index);
                    ev.cons.push_back(
                        ev.s2_cons[static_cast<std::size_t>(it - s2_noises.begin())]);
                    break;
                }
                case ScalarFunctional::Kind::Fidelity:
                    ev.cons.push_back(
                        gate_fidelity(fn.target.matrix(), traj.final_unitary().matrix()));
                    break;
                case ScalarFunctional::Kind::Power:
                    ev.cons.push_back(control_power(model, a));
                    break;
            }
        }
        return ev;
    }

    double constraint_drift(const StepEval& ev) const {
        double d = 0.0;
        for (std::size_t i = 0; i < constraints.targets.size(); ++i) {
            const double scale = std::max(std::abs(constraints.targets[i]), 1.0);
            d = std::max(d, std::abs(ev.cons[i] - constraints.targets[i]) / scale);
        }
        return d;
    }

    TraversalRecord make_record(const std::vector<ParamVector>& a, const StepEval& ev,
                                double dtheta_measured, double ortho_residual) const {
        TraversalRecord rec;
        rec.theta = ev.theta;
        rec.a = a;
        rec.constraint_values = ev.cons;
        rec.s1 = ev.s1_all;
        rec.s2 = ev.s2_cons;
        rec.undesired = ev.undesired;
        rec.dtheta_measured = dtheta_measured;
        rec.ortho_residual = ortho_residual;
        return rec;
    }

    // One micro step of size h from (a, ev); on success a and ev are
    // advanced. Returns the predictor orthogonality residual, or nullopt
    // when the post-correction drift stays above 10x the tolerance.
    struct MicroResult {
        bool ok = false;
        double ortho = 0.0;
    };

    MicroResult micro_step(std::vector<ParamVector>& a, StepEval& ev, double h,
                           const std::optional<HermitianOp>& hint, std::size_t record_count) {
        GradOptions gopt;
        gopt.steps = cfg.steps;
        gopt.fd_step = cfg.fd_step;
        gopt.branch_hint = hint;
        const auto rows = grad_bundle(all_fns, model, a, gopt);
        const std::vector<ParamVector> cgrads(rows.begin() + 1, rows.end());
        ParamVector da;
        try {
            da = gov_step(rows[0], cgrads, h, cfg.eps_irr);
        } catch (const IrregularPoint& e) {
            throw IrregularPoint(e.what(), record_count);
        }
        ParamVector flat = flatten_params(a);
        axpy(1.0, da, flat);
        a = unflatten_params(model, flat);
        const double theta_goal = ev.theta + h;
        ev = evaluate(a, hint);
        if (cfg.correction) {
            // Gauss-Newton correction reusing the predictor Jacobian (valid
            // at this step scale): least-norm update pulling theta back to
            // theta_goal and the constraints back to their targets. Backtracked
            // so the drift measure strictly decreases; when the Jacobian goes
            // stale it is refreshed at the current point before giving up.
            const double cap = 100.0 * norm(da);
            auto measure = [&](const StepEval& e) {
                return constraint_drift(e) + std::abs(e.theta - theta_goal);
            };
            double m_cur = measure(ev);
            std::vector<ParamVector> jac = rows;
            int refreshes = 0;
            for (std::size_t inner = 0;
                 inner < cfg.correction_max_inner &&
                 constraint_drift(ev) > cfg.correction_tol;
                 ++inner) {
                std::vector<double> resid;
                resid.push_back(ev.theta - theta_goal);
                for (std::size_t i = 0; i < constraints.targets.size(); ++i) {
                    resid.push_back(ev.cons[i] - constraints.targets[i]);
                }
                ParamVector corr = least_norm_solve(jac, resid);
                const double cn = norm(corr);
                if (!(cn > 0.0)) break;
                if (cn > cap) {
                    for (auto& x : corr) x *= cap / cn;
                }
                double s = 1.0;
                bool accepted = false;
                for (int ls = 0; ls < 5; ++ls) {
                    ParamVector f = flatten_params(a);
                    axpy(-s, corr, f);
                    const auto a_try = unflatten_params(model, f);
                    const StepEval ev_try = evaluate(a_try, hint);
                    const double m_try = measure(ev_try);
                    if (m_try < m_cur) {
                        a = a_try;
                        ev = ev_try;
                        m_cur = m_try;
                        accepted = true;
                        break;
                    }
                    s *= 0.5;
                }
                if (!accepted) {
                    if (refreshes >= 2) break;
                    jac = grad_bundle(all_fns, model, a, gopt);
                    ++refreshes;
                }
            }
        }
        MicroResult res;
        const double da_n = norm(da);
        for (const auto& g : cgrads) {
            const double gn = norm(g);
            if (gn > 0.0 && da_n > 0.0) {
                res.ortho = std::max(res.ortho, std::abs(dot(da, g)) / (da_n * gn));
            }
        }
        res.ok = !cfg.correction || constraint_drift(ev) <= 10.0 * cfg.correction_tol;
        return res;
    }

    // One pass in the direction of sign; records appended in step order.
    // Each record advances theta by dtheta_ideal; when the corrector cannot
    // hold the constraints across a full step (a high-curvature stretch of
    // the level set), the step is retried as 2^k sub-steps of size
    // dtheta_ideal / 2^k before the record is emitted.
    void run_pass(std::vector<ParamVector> a, StepEval ev, double sign, double theta_target,
                  std::vector<TraversalRecord>& out) {
        const double dtheta = sign * cfg.dtheta_ideal;
        // Stop once theta has come within a quarter step of the target.
        const double margin = 0.25 * cfg.dtheta_ideal;
        std::size_t iters = 0;
        std::optional<HermitianOp> hint = ev.eta;
        while (sign * (theta_target - ev.theta) > margin) {
            if (iters >= cfg.max_iters) {
                throw MaxItersExceeded("ripv_run: max_iters before covering the span");
            }
            const double theta_prev = ev.theta;
            const std::vector<ParamVector> a_save = a;
            const StepEval ev_save = ev;
            double ortho = 0.0;
            bool done = false;
            for (int halvings = 0; halvings <= 4 && !done; ++halvings) {
                a = a_save;
                ev = ev_save;
                ortho = 0.0;
                const std::size_t subs = std::size_t{1} << halvings;
                const double h = dtheta / static_cast<double>(subs);
                done = true;
                for (std::size_t s = 0; s < subs; ++s) {
                    const MicroResult mr = micro_step(a, ev, h, hint, out.size());
                    ortho = std::max(ortho, mr.ortho);
                    if (!mr.ok && halvings < 4) {
                        done = false;
                        break;
                    }
                }
            }
            out.push_back(make_record(a, ev, ev.theta - theta_prev, ortho));
            hint = ev.eta;
            ++iters;
        }
    }
};

}  // namespace

TraversalResult ripv_run(const SystemModel& model, const std::vector<ParamVector>& a0,
                         const HermitianOp& desired, const ConstraintSet& constraints,
                         const TraversalConfig& cfg) {
    model.validate();
    if (cfg.dtheta_ideal <= 0.0) {
        throw ContractViolation("ripv_run: dtheta_ideal must be positive");
    }
    if (cfg.span_lo > 0.0 || cfg.span_hi < 0.0) {
        throw ContractViolation("ripv_run: span must satisfy span_lo <= 0 <= span_hi");
    }
    if (constraints.fns.size() != constraints.targets.size()) {
        throw ContractViolation("ripv_run: constraint targets missing");
    }
    const std::size_t n = flatten_params(a0).size();
    if (n < constraints.fns.size() + 2) {
        throw ContractViolation("ripv_run: need at least m + 2 parameters");
    }

    TraversalWorkspace ws(model, desired, constraints, cfg);
    const StepEval ev0 = ws.evaluate(a0, std::nullopt);
    const double theta0 = ev0.theta;

    std::vector<TraversalRecord> down, up;
    if (cfg.span_lo < 0.0) ws.run_pass(a0, ev0, -1.0, theta0 + cfg.span_lo, down);
    if (cfg.span_hi > 0.0) ws.run_pass(a0, ev0, +1.0, theta0 + cfg.span_hi, up);

    TraversalResult res;
    res.theta0 = theta0;
    res.records.reserve(down.size() + up.size() + 1);
    for (auto it = down.rbegin(); it != down.rend(); ++it) res.records.push_back(*it);
    res.beginning_index = res.records.size();
    res.records.push_back(ws.make_record(a0, ev0, 0.0, 0.0));
    for (auto& rec : up) res.records.push_back(std::move(rec));
    for (std::size_t i = 0; i < res.records.size(); ++i) res.records[i].index = i;
    return res;
}

namespace {

struct Objective {
    const SystemModel& model;
    const OptimizeOptions& opt;
    std::vector<ScalarFunctional> fns;  // S1 per noise, then S2 per noise, then undesired
    std::size_t n_noise = 0;
    std::size_t n_und = 0;

    explicit Objective(const SystemModel& m, const OptimizeOptions& o) : model(m), opt(o) {
        n_noise = m.noises.size();
        for (std::size_t j = 0; j < n_noise; ++j) fns.push_back(ScalarFunctional::s1_of(j));
        if (opt.w2 > 0.0) {
            for (std::size_t j = 0; j < n_noise; ++j) fns.push_back(ScalarFunctional::s2_of(j));
        }
        if (opt.undesired_weight > 0.0) {
            for (const auto& axis : opt.undesired_axes) {
                fns.push_back(ScalarFunctional::undesired(axis));
            }
            n_und = opt.undesired_axes.size();
        }
    }

    double value_of(const std::vector<double>& v) const {
        double j = 0.0;
        std::size_t pos = 0;
        for (std::size_t k = 0; k < n_noise; ++k) j += opt.w1 * v[pos + k] * v[pos + k];
        pos += n_noise;
        if (opt.w2 > 0.0) {
            for (std::size_t k = 0; k < n_noise; ++k) j += opt.w2 * v[pos + k] * v[pos + k];
            pos += n_noise;
        }
        for (std::size_t k = 0; k < n_und; ++k) {
            j += opt.undesired_weight * v[pos + k] * v[pos + k];
        }
        return j;
    }

    std::vector<double> eval(const std::vector<ParamVector>& a) const {
        return eval_functionals(fns, model, a, opt.steps, std::nullopt);
    }

    ParamVector gradient(const std::vector<ParamVector>& a,
                         const std::vector<double>& v) const {
        GradOptions gopt;
        gopt.steps = opt.steps;
        gopt.fd_step = opt.fd_step;
        const auto rows = grad_bundle(fns, model, a, gopt);
        ParamVector g(rows.front().size(), 0.0);
        std::size_t pos = 0;
        for (std::size_t k = 0; k < n_noise; ++k) {
            axpy(2.0 * opt.w1 * v[pos + k], rows[pos + k], g);
        }
        pos += n_noise;
        if (opt.w2 > 0.0) {
            for (std::size_t k = 0; k < n_noise; ++k) {
                axpy(2.0 * opt.w2 * v[pos + k], rows[pos + k], g);
            }
            pos += n_noise;
        }
        for (std::size_t k = 0; k < n_und; ++k) {
            axpy(2.0 * opt.undesired_weight * v[pos + k], rows[pos + k], g);
        }
        return g;
    }

    double amp_excess(const std::vector<ParamVector>& a) const {
        const double T = model.gate_time();
        double m2 = 0.0;
        for (int i = 0; i <= 512; ++i) {
            const double t = T * static_cast<double>(i) / 512.0;
            double s = 0.0;
            for (std::size_t k = 0; k < model.controls.size(); ++k) {
                const double w = eval_pulse(model.controls[k].basis, a[k], t);
                s += w * w;
            }
            m2 = std::max(m2, s);
        }
        return std::max(std::sqrt(m2) - opt.amp_cap, 0.0);
    }

    double amp_term(const std::vector<ParamVector>& a) const {
        if (opt.amp_weight <= 0.0) return 0.0;
        const double e = amp_excess(a);
        return opt.amp_weight * e * e;
    }

    void add_amp_gradient(const std::vector<ParamVector>& a, ParamVector& g) const {
        if (opt.amp_weight <= 0.0) return;
        ParamVector flat = flatten_params(a);
        const double h = 1e-6;
        for (std::size_t j = 0; j < flat.size(); ++j) {
            const double base = flat[j];
            flat[j] = base + h;
            const double ep = amp_excess(unflatten_params(model, flat));
            flat[j] = base - h;
            const double em = amp_excess(unflatten_params(model, flat));
            flat[j] = base;
            g[j] += opt.amp_weight * (ep * ep - em * em) / (2.0 * h);
        }
    }

    bool target_met(const std::vector<double>& v, const std::vector<ParamVector>& a) const {
        for (std::size_t k = 0; k < n_noise; ++k) {
            if (v[k] > opt.s1_target) return false;
        }
        // Penalized terms must actually be small before stopping: the
        // undesired angles within their tolerance and the amplitude excess
        // negligible against the cap.
        const std::size_t und_base = n_noise + (opt.w2 > 0.0 ? n_noise : 0);
        for (std::size_t k = 0; k < n_und; ++k) {
            if (std::abs(v[und_base + k]) > opt.undesired_tol) return false;
        }
        return opt.amp_weight <= 0.0 || amp_excess(a) <= 0.1 * opt.amp_cap;
    }
};

}  // namespace

std::vector<ParamVector> optimize_beginning(const SystemModel& model,
                                            const std::vector<ParamVector>& a_init,
                                            const OptimizeOptions& opt) {
    model.validate();
    if (opt.w1 < 0.0 || opt.w2 < 0.0 || (opt.w1 == 0.0 && opt.w2 == 0.0)) {
        throw ContractViolation("optimize_beginning: weights must be >= 0, not both 0");
    }
    const Objective obj(model, opt);

    std::vector<ParamVector> a = a_init;
    std::vector<double> v = obj.eval(a);
    double j = obj.value_of(v) + obj.amp_term(a);

    std::vector<ParamVector> best_a = a;
    double best_j = j;
    if (obj.target_met(v, a)) return a;

    double alpha = 1.0;
    std::size_t fails = 0;
    for (std::size_t iter = 0; iter < opt.max_iters; ++iter) {
        ParamVector g = obj.gradient(a, v);
        obj.add_amp_gradient(a, g);
        const double g2 = dot(g, g);
        if (g2 == 0.0) break;

        // Armijo backtracking, halving from the last accepted scale.
        bool accepted = false;
        double step = alpha;
        for (int ls = 0; ls < 60; ++ls) {
            ParamVector flat = flatten_params(a);
            axpy(-step, g, flat);
            const auto a_try = unflatten_params(model, flat);
            const auto v_try = obj.eval(a_try);
            const double j_try = obj.value_of(v_try) + obj.amp_term(a_try);
            if (j_try <= j - 1e-4 * step * g2) {
                a = a_try;
                v = v_try;
                j = j_try;
                alpha = 2.0 * step;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (++fails >= 40) throw NoDescent("optimize_beginning: line search stalled");
            alpha *= 0.5;
            continue;
        }
        fails = 0;
        if (j < best_j) {
            best_j = j;
            best_a = a;
        }
        if (obj.target_met(v, a)) return a;
    }
    return best_a;
}

std::vector<ParamVector> correcting_step(const SystemModel& model,
                                         const std::vector<ParamVector>& a,
                                         const HermitianOp& desired, double theta_target,
                                         const ConstraintSet& constraints,
                                         std::size_t max_inner, std::size_t steps) {
    // Target unitary on the desired axis (axis normalized to Tr sigma^2 = 2).
    const UnitaryOp u_target = mat_exp(desired, 0.5 * theta_target);

    std::vector<ScalarFunctional> fns;
    fns.push_back(ScalarFunctional::fidelity(u_target));
    for (const auto& fn : constraints.fns) fns.push_back(fn);

    auto residual = [&](const std::vector<double>& v) {
        double r = (1.0 - v[0]) * (1.0 - v[0]);
        for (std::size_t i = 0; i < constraints.targets.size(); ++i) {
            const double d = v[i + 1] - constraints.targets[i];
            r += d * d;
        }
        return r;
    };

    std::vector<ParamVector> cur = a;
    std::vector<double> v = eval_functionals(fns, model, cur, steps, std::nullopt);
    double r = residual(v);
    for (std::size_t iter = 0; iter < max_inner; ++iter) {
        if (r == 0.0) break;
        // Damped Gauss-Newton: least-norm parameter update solving the
        // linearized residual system, backtracked on the squared residual.
        GradOptions gopt;
        gopt.steps = steps;
        auto rows = grad_bundle(fns, model, cur, gopt);
        for (auto& x : rows[0]) x = -x;  // d(1 - F)/dA
        std::vector<double> e;
        e.push_back(1.0 - v[0]);
        for (std::size_t i = 0; i < constraints.targets.size(); ++i) {
            e.push_back(v[i + 1] - constraints.targets[i]);
        }
        const ParamVector da = least_norm_solve(rows, e);
        if (!(norm(da) > 0.0)) break;
        bool accepted = false;
        double step = 1.0;
        for (int ls = 0; ls < 20; ++ls) {
            ParamVector flat = flatten_params(cur);
            axpy(-step, da, flat);
            const auto a_try = unflatten_params(model, flat);
            const auto v_try = eval_functionals(fns, model, a_try, steps, std::nullopt);
            const double r_try = residual(v_try);
            if (r_try < r) {
                cur = a_try;
                v = v_try;
                r = r_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // best effort
    }
    return cur;
}

namespace {

// Fritsch-Carlson monotone cubic slopes for one component.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n - 1), m(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        const double a = m[i] / d[i];
        const double b = m[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            m[i] = t * a * d[i];
            m[i + 1] = t * b * d[i];
        }
    }
    return m;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& m, std::size_t i, double xs) {
    const double h = x[i + 1] - x[i];
    const double t = (xs - x[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return y[i] * (2.0 * t3 - 3.0 * t2 + 1.0) + h * m[i] * (t3 - 2.0 * t2 + t) +
           y[i + 1] * (-2.0 * t3 + 3.0 * t2) + h * m[i + 1] * (t3 - t2);
}

}  // namespace

std::vector<ParamVector> interpolate(const std::vector<TraversalRecord>& records,
                                     double theta_star) {
    if (records.empty()) throw ContractViolation("interpolate: empty record list");
    const std::size_t n = records.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = records[i].theta;
    if (!std::is_sorted(x.begin(), x.end())) {
        throw ContractViolation("interpolate: records must be sorted by theta");
    }
    if (theta_star < x.front() || theta_star > x.back()) {
        throw OutOfRange("interpolate: theta outside the record range");
    }
    if (n == 1) return records.front().a;

    // Exact at knots.
    const auto it = std::lower_bound(x.begin(), x.end(), theta_star);
    if (it != x.end() && *it == theta_star) {
        return records[static_cast<std::size_t>(it - x.begin())].a;
    }
    std::size_t seg = static_cast<std::size_t>(it - x.begin()) - 1;

    std::vector<ParamVector> flats(n);
    for (std::size_t i = 0; i < n; ++i) flats[i] = flatten_params(records[i].a);
    const std::size_t dim = flats.front().size();
    ParamVector out(dim, 0.0);
    std::vector<double> y(n);
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t i = 0; i < n; ++i) y[i] = flats[i][c];
        if (n == 2) {
            const double t = (theta_star - x[0]) / (x[1] - x[0]);
            out[c] = (1.0 - t) * y[0] + t * y[1];
        } else {
            const auto m = pchip_slopes(x, y);
            out[c] = pchip_eval(x, y, m, seg, theta_star);
        }
    }

    // Rebuild the per-control shape from any record's layout.
    std::vector<ParamVector> shaped;
    std::size_t pos = 0;
    for (const auto& block : records.front().a) {
        shaped.emplace_back(out.begin() + static_cast<std::ptrdiff_t>(pos),
                            out.begin() + static_cast<std::ptrdiff_t>(pos + block.size()));
        pos += block.size();
    }
    return shaped;
}

}  // namespace qcrl
