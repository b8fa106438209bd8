// qcrl: engineer and explore noise-robust control pulses.
//
// Verbs: optimize, traverse, sweep, qeed, interp.
// Exit codes: 0 ok, 1 config/schema error, 2 optimize best-effort,
// 3 irregular point, 4 qeed unsupported dimension, 5 interp out of range.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcrl/errors.hpp"
#include "qcrl/io.hpp"
#include "qcrl/models.hpp"
#include "qcrl/rng.hpp"

namespace {

using namespace qcrl;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> nt;
    std::optional<std::size_t> select_every;
};

RunConfig load_with_overrides(const CommonArgs& args) {
    RunConfig cfg = load_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.nt) cfg.nt = *args.nt;
    if (args.select_every) cfg.select_every = *args.select_every;
    return cfg;
}

GatePreset make_preset(const RunConfig& cfg) { return preset(cfg.preset, cfg.basis); }

std::vector<ScalarFunctional> resolve_constraints(const GatePreset& gp,
                                                  const std::vector<ConstraintSpec>& specs) {
    std::vector<ScalarFunctional> fns;
    for (const auto& spec : specs) {
        switch (spec.kind) {
            case ConstraintSpec::Kind::S1:
                if (spec.index >= gp.model.noises.size()) {
                    throw ContractViolation("config: constraint noise index out of range");
                }
                fns.push_back(ScalarFunctional::s1_of(spec.index));
                break;
            case ConstraintSpec::Kind::S2:
                if (spec.index >= gp.model.noises.size()) {
                    throw ContractViolation("config: constraint noise index out of range");
                }
                fns.push_back(ScalarFunctional::s2_of(spec.index));
                break;
            case ConstraintSpec::Kind::Undesired:
                if (spec.index >= gp.undesired.size()) {
                    throw ContractViolation("config: constraint axis index out of range");
                }
                fns.push_back(ScalarFunctional::undesired(gp.undesired[spec.index]));
                break;
        }
    }
    return fns;
}

PulseFile make_pulse_file(const RunConfig& cfg, const GatePreset& gp,
                          const std::vector<ParamVector>& a) {
    PulseFile pf;
    pf.preset = cfg.preset;
    pf.basis = cfg.basis;
    pf.a = a;
    const Trajectory traj = propagate(gp.model, a, cfg.nt);
    const auto eta = mat_log_unitary(traj.final_unitary(), std::nullopt);
    pf.theta = pauli_project(eta, gp.desired);
    for (const auto& nz : gp.model.noises) {
        pf.s1.push_back(s1(traj, nz.op).s1);
        pf.s2.push_back(s2(traj, nz.op).s2);
    }
    return pf;
}

// Default starting point: baseline pulse with area 2 pi on the first
// amplitude plus a small seeded perturbation on the rest.
std::vector<ParamVector> default_init(const RunConfig& cfg, const GatePreset& gp) {
    if (!cfg.seed) {
        throw ContractViolation(
            "config: field 'seed': required when optimize.init is absent");
    }
    Rng rng(*cfg.seed);
    std::vector<ParamVector> a;
    const double a0 = M_PI * M_PI / cfg.basis.gate_time;
    for (std::size_t k = 0; k < gp.model.controls.size(); ++k) {
        ParamVector v(gp.model.controls[k].basis.param_count(), 0.0);
        if (k == 0 && !v.empty()) v[0] = a0;
        for (auto& x : v) x += rng.uniform(-0.1 * a0, 0.1 * a0);
        a.push_back(std::move(v));
    }
    return a;
}

int cmd_optimize(const CommonArgs& args) {
    const RunConfig cfg = load_with_overrides(args);
    const GatePreset gp = make_preset(cfg);

    OptimizeOptions opt;
    opt.w1 = cfg.w1;
    opt.w2 = cfg.w2;
    opt.s1_target = cfg.s1_target;
    opt.max_iters = cfg.opt_max_iters;
    opt.steps = cfg.nt;
    opt.undesired_weight = cfg.undesired_weight;
    if (opt.undesired_weight > 0.0) opt.undesired_axes = gp.undesired;
    opt.amp_weight = cfg.amp_weight;
    opt.amp_cap = cfg.amp_cap;

    const auto a_init = cfg.init ? *cfg.init : default_init(cfg, gp);
    const auto a = optimize_beginning(gp.model, a_init, opt);
    const PulseFile pf = make_pulse_file(cfg, gp, a);
    write_pulse_file(args.out_path, pf);

    const double s1_max = *std::max_element(pf.s1.begin(), pf.s1.end());
    std::cout << "optimize: theta0 = " << pf.theta << ", max S1 = " << s1_max
              << " (target " << cfg.s1_target << ")\n";
    return s1_max <= cfg.s1_target ? 0 : 2;
}

int cmd_traverse(const CommonArgs& args, const std::string& pulse_path) {
    const RunConfig cfg = load_with_overrides(args);
    const PulseFile pf = read_pulse_file(pulse_path);
    const GatePreset gp = preset(pf.preset, pf.basis);

    const auto fns = resolve_constraints(gp, cfg.constraints);
    const ConstraintSet constraints = ConstraintSet::capture(gp.model, pf.a, fns, cfg.nt);

    TraversalConfig tc;
    tc.dtheta_ideal = cfg.dtheta_ideal;
    tc.span_lo = cfg.span_lo;
    tc.span_hi = cfg.span_hi;
    tc.max_iters = cfg.trav_max_iters;
    tc.eps_irr = cfg.eps_irr;
    tc.step_tol_rel = cfg.step_tol_rel;
    tc.steps = cfg.nt;

    TraversalResult res;
    try {
        res = ripv_run(gp.model, pf.a, gp.desired, constraints, tc);
    } catch (const IrregularPoint& e) {
        std::cerr << "irregular point after record " << e.record_index << ": " << e.what()
                  << "\n";
        return 3;
    }
    write_records(args.out_path, res.records);

    std::cout << "traverse: " << res.records.size() << " records, theta in ["
              << res.records.front().theta << ", " << res.records.back().theta << "]\n";
    for (std::size_t i = 0; i < constraints.fns.size(); ++i) {
        double lo = res.records.front().constraint_values[i];
        double hi = lo;
        for (const auto& r : res.records) {
            lo = std::min(lo, r.constraint_values[i]);
            hi = std::max(hi, r.constraint_values[i]);
        }
        std::cout << "  constraint " << i << ": target " << constraints.targets[i]
                  << ", range [" << lo << ", " << hi << "]\n";
    }
    return 0;
}

double omega_max(const SystemModel& model, const std::vector<ParamVector>& a) {
    const double T = model.gate_time();
    const int samples = 2048;
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = T * static_cast<double>(i) / samples;
        double s = 0.0;
        for (std::size_t k = 0; k < model.controls.size(); ++k) {
            const double w = eval_pulse(model.controls[k].basis, a[k], t);
            s += w * w;
        }
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

std::vector<std::size_t> select_indices(std::size_t count, std::size_t every) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < count; i += every) idx.push_back(i);
    if (!idx.empty() && idx.back() != count - 1) idx.push_back(count - 1);
    return idx;
}

int cmd_sweep(const CommonArgs& args, const std::string& records_path) {
    const RunConfig cfg = load_with_overrides(args);
    const GatePreset gp = make_preset(cfg);
    const auto records = read_records(records_path);
    if (records.empty()) throw ContractViolation("sweep: empty records file");

    std::vector<double> rel;
    for (std::size_t i = 0; i < cfg.sweep_points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(cfg.sweep_points - 1);
        rel.push_back(cfg.rel_min * std::pow(cfg.rel_max / cfg.rel_min, f));
    }
    std::vector<double> grid;
    for (auto it = rel.rbegin(); it != rel.rend(); ++it) grid.push_back(-*it);
    for (double r : rel) grid.push_back(r);

    std::vector<SweepRow> rows;
    for (std::size_t i : select_indices(records.size(), cfg.select_every)) {
        const auto& rec = records[i];
        const double om = omega_max(gp.model, rec.a);
        const UnitaryOp u_sc = propagate(gp.model, rec.a, cfg.nt).final_unitary();
        for (double r : grid) {
            const double delta = r * om;
            const std::vector<double> dvec(gp.model.noises.size(), delta);
            const UnitaryOp u_scn = noisy_propagate(gp.model, rec.a, dvec, cfg.nt);
            SweepRow row;
            row.theta = rec.theta;
            row.delta_rel = r;
            row.infidelity = 1.0 - gate_fidelity(u_sc, u_scn);
            rows.push_back(row);
        }
    }
    write_sweep_csv(args.out_path, rows);
    std::cout << "sweep: " << rows.size() << " rows\n";
    return 0;
}

int cmd_qeed(const CommonArgs& args, const std::string& records_path) {
    const RunConfig cfg = load_with_overrides(args);
    const GatePreset gp = make_preset(cfg);
    if (gp.model.dim != 2) {
        std::cerr << "qeed: only d = 2 models supported\n";
        return 4;
    }
    const auto records = read_records(records_path);
    if (records.empty()) throw ContractViolation("qeed: empty records file");

    std::filesystem::create_directories(args.out_path);
    std::ofstream manifest(std::filesystem::path(args.out_path) / "manifest.csv");
    manifest << "theta,file\n";
    for (std::size_t i : select_indices(records.size(), cfg.select_every)) {
        const auto& rec = records[i];
        const Trajectory traj = propagate(gp.model, rec.a, cfg.nt);
        const QeedCurve curve = qeed_curve(traj, gp.model.noises.front().op);
        const std::string name = "qeed_" + std::to_string(rec.index) + ".csv";
        write_qeed_csv((std::filesystem::path(args.out_path) / name).string(), curve);
        manifest << fmt17(rec.theta) << "," << name << "\n";
    }
    std::cout << "qeed: wrote curves to " << args.out_path << "\n";
    return 0;
}

int cmd_interp(const CommonArgs& args, const std::string& records_path, double theta) {
    const RunConfig cfg = load_with_overrides(args);
    const GatePreset gp = make_preset(cfg);
    const auto records = read_records(records_path);

    std::vector<ParamVector> a;
    try {
        a = interpolate(records, theta);
    } catch (const OutOfRange& e) {
        std::cerr << e.what() << "\n";
        return 5;
    }
    PulseFile pf = make_pulse_file(cfg, gp, a);
    write_pulse_file(args.out_path, pf);
    std::cout << "interp: requested theta = " << theta << ", extracted theta = " << pf.theta
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noise-robust pulse engineering"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string pulse_path, records_path;
    double theta = 0.0;

    auto add_common = [&](CLI::App* sub, bool needs_out) {
        sub->add_option("--config", args.config_path, "JSON run config")->required();
        if (needs_out) sub->add_option("--out", args.out_path, "output path")->required();
        sub->add_option("--seed", args.seed, "override config seed");
        sub->add_option("--nt", args.nt, "override propagation steps");
        sub->add_option("--select-every", args.select_every, "record selection stride");
    };

    auto* opt = app.add_subcommand("optimize", "optimize a beginning pulse");
    add_common(opt, true);

    auto* trav = app.add_subcommand("traverse", "RIPV level-set traversal");
    add_common(trav, true);
    trav->add_option("--pulse", pulse_path, "beginning pulse file")->required();

    auto* sweep = app.add_subcommand("sweep", "infidelity sweep over noise strengths");
    add_common(sweep, true);
    sweep->add_option("--records", records_path, "traversal records file")->required();

    auto* qeed = app.add_subcommand("qeed", "error-curve CSV files per selected record");
    add_common(qeed, true);
    qeed->add_option("--records", records_path, "traversal records file")->required();

    auto* interp = app.add_subcommand("interp", "interpolate a pulse at a target angle");
    add_common(interp, true);
    interp->add_option("--records", records_path, "traversal records file")->required();
    interp->add_option("--theta", theta, "target rotation angle, rad")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt->parsed()) return cmd_optimize(args);
        if (trav->parsed()) return cmd_traverse(args, pulse_path);
        if (sweep->parsed()) return cmd_sweep(args, records_path);
        if (qeed->parsed()) return cmd_qeed(args, records_path);
        if (interp->parsed()) return cmd_interp(args, records_path, theta);
    } catch (const ContractViolation& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
