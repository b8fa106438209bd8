#include "qcrl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qcrl/errors.hpp"

namespace qcrl {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ContractViolation("config: field '" + field + "': " + why);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ContractViolation("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

template <typename T>
T get_or(const json& j, const std::string& key, T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_field(key, "wrong type");
    }
}

template <typename T>
T get_req(const json& j, const std::string& key) {
    if (!j.contains(key)) bad_field(key, "missing");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_field(key, "wrong type");
    }
}

json basis_to_json(const PulseBasis& basis) {
    json j;
    j["gate_time"] = basis.gate_time;
    if (const auto* pc = std::get_if<PiecewiseConstant>(&basis.kind)) {
        j["kind"] = "piecewise";
        j["segments"] = pc->segments;
    } else if (const auto* tp = std::get_if<TaylorProduct>(&basis.kind)) {
        j["kind"] = "taylor_product";
        j["terms"] = tp->terms;
    } else if (const auto* wf = std::get_if<WindowedFourier>(&basis.kind)) {
        j["kind"] = "windowed_fourier";
        j["harmonics"] = wf->harmonics;
        j["phase_form"] = wf->phase_form;
        switch (wf->window) {
            case FourierWindow::Sin:
                j["window"] = "sin";
                break;
            case FourierWindow::SinSq:
                j["window"] = "sin2";
                break;
            case FourierWindow::Gaussian:
                j["window"] = "gaussian";
                j["gaussian_sigma"] = wf->gaussian_sigma;
                break;
        }
    } else if (const auto* ml = std::get_if<Morlet>(&basis.kind)) {
        j["kind"] = "morlet";
        j["orders"] = ml->orders;
        j["ratio"] = ml->ratio;
    }
    return j;
}

PulseBasis basis_from_json(const json& j, double default_gate_time) {
    PulseBasis basis;
    basis.gate_time = get_or<double>(j, "gate_time", default_gate_time);
    if (basis.gate_time <= 0.0) bad_field("basis.gate_time", "must be positive");
    const auto kind = get_req<std::string>(j, "kind");
    if (kind == "piecewise") {
        PiecewiseConstant pc;
        pc.segments = get_req<std::size_t>(j, "segments");
        if (pc.segments < 1) bad_field("basis.segments", "must be >= 1");
        basis.kind = pc;
    } else if (kind == "taylor_product") {
        TaylorProduct tp;
        tp.terms = get_req<std::size_t>(j, "terms");
        if (tp.terms < 1) bad_field("basis.terms", "must be >= 1");
        basis.kind = tp;
    } else if (kind == "windowed_fourier") {
        WindowedFourier wf;
        wf.harmonics = get_req<std::size_t>(j, "harmonics");
        if (wf.harmonics < 1) bad_field("basis.harmonics", "must be >= 1");
        wf.phase_form = get_or<bool>(j, "phase_form", true);
        const auto window = get_or<std::string>(j, "window", "sin");
        if (window == "sin") {
            wf.window = FourierWindow::Sin;
        } else if (window == "sin2") {
            wf.window = FourierWindow::SinSq;
        } else if (window == "gaussian") {
            wf.window = FourierWindow::Gaussian;
            wf.gaussian_sigma = get_req<double>(j, "gaussian_sigma");
            if (wf.gaussian_sigma <= 0.0) bad_field("basis.gaussian_sigma", "must be positive");
        } else {
            bad_field("basis.window", "must be sin, sin2 or gaussian");
        }
        basis.kind = wf;
    } else if (kind == "morlet") {
        Morlet ml;
        ml.orders = get_req<std::size_t>(j, "orders");
        if (ml.orders < 1) bad_field("basis.orders", "must be >= 1");
        ml.ratio = get_or<double>(j, "ratio", 2.0);
        if (ml.ratio <= 0.0) bad_field("basis.ratio", "must be positive");
        basis.kind = ml;
    } else {
        bad_field("basis.kind", "unknown basis kind '" + kind + "'");
    }
    return basis;
}

std::vector<ConstraintSpec> constraints_from_json(const json& arr) {
    std::vector<ConstraintSpec> out;
    for (const auto& j : arr) {
        ConstraintSpec c;
        const auto kind = get_req<std::string>(j, "kind");
        if (kind == "s1") {
            c.kind = ConstraintSpec::Kind::S1;
        } else if (kind == "s2") {
            c.kind = ConstraintSpec::Kind::S2;
        } else if (kind == "undesired") {
            c.kind = ConstraintSpec::Kind::Undesired;
        } else {
            bad_field("traverse.constraints.kind", "must be s1, s2 or undesired");
        }
        c.index = get_or<std::size_t>(j, "index", 0);
        out.push_back(c);
    }
    return out;
}

NoiseDistribution dist_from_json(const json& j) {
    NoiseDistribution dist;
    if (!j.contains("laws")) bad_field("noise.laws", "missing");
    for (const auto& lj : j.at("laws")) {
        NoiseLaw law;
        const auto kind = get_req<std::string>(lj, "kind");
        if (kind == "fixed") {
            law.kind = NoiseLaw::Kind::Fixed;
        } else if (kind == "uniform") {
            law.kind = NoiseLaw::Kind::Uniform;
        } else if (kind == "gaussian") {
            law.kind = NoiseLaw::Kind::Gaussian;
        } else {
            bad_field("noise.laws.kind", "must be fixed, uniform or gaussian");
        }
        law.value = get_req<double>(lj, "value");
        if (law.kind != NoiseLaw::Kind::Fixed && law.value < 0.0) {
            bad_field("noise.laws.value", "must be >= 0");
        }
        dist.laws.push_back(law);
    }
    dist.samples = get_or<std::size_t>(j, "samples", 1000);
    if (dist.samples < 1) bad_field("noise.samples", "must be >= 1");
    return dist;
}

json params_to_json(const std::vector<ParamVector>& a) {
    json arr = json::array();
    for (const auto& v : a) arr.push_back(v);
    return arr;
}

std::vector<ParamVector> params_from_json(const json& arr, const std::string& field) {
    std::vector<ParamVector> a;
    try {
        for (const auto& v : arr) a.push_back(v.get<ParamVector>());
    } catch (const json::exception&) {
        bad_field(field, "expected an array of number arrays");
    }
    return a;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    const json j = load_json(path);
    RunConfig cfg;
    cfg.preset = get_or<std::string>(j, "preset", cfg.preset);
    cfg.gate_time = get_or<double>(j, "gate_time", cfg.gate_time);
    if (cfg.gate_time <= 0.0) bad_field("gate_time", "must be positive");
    if (j.contains("basis")) {
        cfg.basis = basis_from_json(j.at("basis"), cfg.gate_time);
    } else {
        WindowedFourier wf;
        wf.harmonics = 4;
        cfg.basis.kind = wf;
        cfg.basis.gate_time = cfg.gate_time;
    }
    cfg.nt = get_or<std::size_t>(j, "nt", cfg.nt);
    if (cfg.nt < 16) bad_field("nt", "must be >= 16");
    if (j.contains("seed")) cfg.seed = get_req<std::uint64_t>(j, "seed");

    if (j.contains("optimize")) {
        const json& o = j.at("optimize");
        cfg.w1 = get_or<double>(o, "w1", cfg.w1);
        cfg.w2 = get_or<double>(o, "w2", cfg.w2);
        if (cfg.w1 < 0.0) bad_field("optimize.w1", "must be >= 0");
        if (cfg.w2 < 0.0) bad_field("optimize.w2", "must be >= 0");
        if (cfg.w1 == 0.0 && cfg.w2 == 0.0) bad_field("optimize.w1", "w1 and w2 both zero");
        cfg.s1_target = get_or<double>(o, "s1_target", cfg.s1_target);
        if (cfg.s1_target < 0.0) bad_field("optimize.s1_target", "must be >= 0");
        cfg.opt_max_iters = get_or<std::size_t>(o, "max_iters", cfg.opt_max_iters);
        cfg.undesired_weight = get_or<double>(o, "undesired_weight", cfg.undesired_weight);
        if (cfg.undesired_weight < 0.0) bad_field("optimize.undesired_weight", "must be >= 0");
        cfg.amp_weight = get_or<double>(o, "amp_weight", cfg.amp_weight);
        if (cfg.amp_weight < 0.0) bad_field("optimize.amp_weight", "must be >= 0");
        cfg.amp_cap = get_or<double>(o, "amp_cap", cfg.amp_cap);
        if (cfg.amp_cap < 0.0) bad_field("optimize.amp_cap", "must be >= 0");
        if (o.contains("init")) cfg.init = params_from_json(o.at("init"), "optimize.init");
    }

    if (j.contains("traverse")) {
        const json& t = j.at("traverse");
        cfg.dtheta_ideal = get_or<double>(t, "dtheta_ideal", cfg.dtheta_ideal);
        if (cfg.dtheta_ideal <= 0.0) bad_field("traverse.dtheta_ideal", "must be positive");
        cfg.span_lo = get_or<double>(t, "span_lo", cfg.span_lo);
        cfg.span_hi = get_or<double>(t, "span_hi", cfg.span_hi);
        if (cfg.span_lo > 0.0) bad_field("traverse.span_lo", "must be <= 0");
        if (cfg.span_hi < 0.0) bad_field("traverse.span_hi", "must be >= 0");
        cfg.trav_max_iters = get_or<std::size_t>(t, "max_iters", cfg.trav_max_iters);
        cfg.eps_irr = get_or<double>(t, "eps_irr", cfg.eps_irr);
        if (cfg.eps_irr <= 0.0 || cfg.eps_irr >= 1.0) {
            bad_field("traverse.eps_irr", "must be in (0, 1)");
        }
        cfg.step_tol_rel = get_or<double>(t, "step_tol_rel", cfg.step_tol_rel);
        if (t.contains("constraints")) {
            cfg.constraints = constraints_from_json(t.at("constraints"));
        }
    }

    if (j.contains("noise")) cfg.dist = dist_from_json(j.at("noise"));

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        cfg.sweep_points = get_or<std::size_t>(s, "points", cfg.sweep_points);
        if (cfg.sweep_points < 2) bad_field("sweep.points", "must be >= 2");
        cfg.rel_min = get_or<double>(s, "rel_min", cfg.rel_min);
        cfg.rel_max = get_or<double>(s, "rel_max", cfg.rel_max);
        if (cfg.rel_min <= 0.0 || cfg.rel_max <= cfg.rel_min) {
            bad_field("sweep.rel_min", "need 0 < rel_min < rel_max");
        }
        cfg.select_every = get_or<std::size_t>(s, "select_every", cfg.select_every);
        if (cfg.select_every < 1) bad_field("sweep.select_every", "must be >= 1");
    }
    return cfg;
}

void write_pulse_file(const std::string& path, const PulseFile& pf) {
    json j;
    j["preset"] = pf.preset;
    j["basis"] = basis_to_json(pf.basis);
    j["a"] = params_to_json(pf.a);
    j["theta"] = pf.theta;
    j["s1"] = pf.s1;
    j["s2"] = pf.s2;
    std::ofstream out(path);
    if (!out) throw ContractViolation("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

PulseFile read_pulse_file(const std::string& path) {
    const json j = load_json(path);
    PulseFile pf;
    pf.preset = get_req<std::string>(j, "preset");
    if (!j.contains("basis")) bad_field("basis", "missing");
    pf.basis = basis_from_json(j.at("basis"), 50.0);
    if (!j.contains("a")) bad_field("a", "missing");
    pf.a = params_from_json(j.at("a"), "a");
    pf.theta = get_or<double>(j, "theta", 0.0);
    pf.s1 = get_or<std::vector<double>>(j, "s1", {});
    pf.s2 = get_or<std::vector<double>>(j, "s2", {});
    return pf;
}

void write_records(const std::string& path, const std::vector<TraversalRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ContractViolation("cannot write file: " + path);
    for (const auto& r : records) {
        json j;
        j["index"] = r.index;
        j["theta"] = r.theta;
        j["a"] = params_to_json(r.a);
        j["constraints"] = r.constraint_values;
        j["s1"] = r.s1;
        j["s2"] = r.s2;
        j["undesired"] = r.undesired;
        j["dtheta_measured"] = r.dtheta_measured;
        j["ortho_residual"] = r.ortho_residual;
        out << j.dump(-1, ' ', false, json::error_handler_t::strict) << "\n";
    }
}

std::vector<TraversalRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("cannot open file: " + path);
    std::vector<TraversalRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ContractViolation("invalid record line: " + std::string(e.what()));
        }
        TraversalRecord r;
        r.index = get_req<std::size_t>(j, "index");
        r.theta = get_req<double>(j, "theta");
        if (!j.contains("a")) bad_field("a", "missing");
        r.a = params_from_json(j.at("a"), "a");
        r.constraint_values = get_or<std::vector<double>>(j, "constraints", {});
        r.s1 = get_or<std::vector<double>>(j, "s1", {});
        r.s2 = get_or<std::vector<double>>(j, "s2", {});
        r.undesired = get_or<std::vector<double>>(j, "undesired", {});
        r.dtheta_measured = get_or<double>(j, "dtheta_measured", 0.0);
        r.ortho_residual = get_or<double>(j, "ortho_residual", 0.0);
        out.push_back(r);
    }
    return out;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ContractViolation("cannot write file: " + path);
    out << "theta,delta_rel,infidelity\n";
    for (const auto& r : rows) {
        out << fmt17(r.theta) << "," << fmt17(r.delta_rel) << "," << fmt17(r.infidelity)
            << "\n";
    }
}

void write_qeed_csv(const std::string& path, const QeedCurve& curve) {
    std::ofstream out(path);
    if (!out) throw ContractViolation("cannot write file: " + path);
    out << "t,rx,ry,rz\n";
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        out << fmt17(curve.t[i]) << "," << fmt17(curve.rx[i]) << "," << fmt17(curve.ry[i])
            << "," << fmt17(curve.rz[i]) << "\n";
    }
}

}  // namespace qcrl
