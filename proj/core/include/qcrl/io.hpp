#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcrl/levelset.hpp"
#include "qcrl/robustness.hpp"

namespace qcrl {

// Constraint selector as written in config files; resolved against a
// GatePreset (noise index for s1/s2, undesired-axis index otherwise).
struct ConstraintSpec {
    enum class Kind { S1, S2, Undesired } kind = Kind::S1;
    std::size_t index = 0;
};

struct RunConfig {
    std::string preset = "sq_x_z";
    double gate_time = 50.0;
    PulseBasis basis;  // gate_time already applied
    std::size_t nt = 1024;
    std::optional<std::uint64_t> seed;

    // optimize
    double w1 = 1.0;
    double w2 = 0.0;
    double s1_target = 2.5;
    std::size_t opt_max_iters = 5000;
    double undesired_weight = 0.0;
    double amp_weight = 0.0;
    double amp_cap = 0.0;
    std::optional<std::vector<ParamVector>> init;

    // traverse
    double dtheta_ideal = 1e-3;
    double span_lo = 0.0;
    double span_hi = 0.0;
    std::size_t trav_max_iters = 100000;
    double eps_irr = 1e-6;
    double step_tol_rel = 0.1;
    std::vector<ConstraintSpec> constraints;

    // noise distribution (integral-robustness reporting)
    std::optional<NoiseDistribution> dist;

    // sweep
    std::size_t sweep_points = 61;
    double rel_min = 1e-4;
    double rel_max = 0.3;
    std::size_t select_every = 100;
};

// Parses and validates a JSON config file. Diagnostics name the offending
// field; all failures throw ContractViolation.
RunConfig load_config(const std::string& path);

// Beginning-pulse file: parameters plus the susceptibility report taken at
// the stored parameters.
struct PulseFile {
    std::string preset;
    PulseBasis basis;
    std::vector<ParamVector> a;
    double theta = 0.0;
    std::vector<double> s1;  // per noise term
    std::vector<double> s2;  // per noise term
};

void write_pulse_file(const std::string& path, const PulseFile& pf);
PulseFile read_pulse_file(const std::string& path);

// Traversal records as line-delimited JSON, one record per line,
// 17 significant digits.
void write_records(const std::string& path, const std::vector<TraversalRecord>& records);
std::vector<TraversalRecord> read_records(const std::string& path);

struct SweepRow {
    double theta = 0.0;
    double delta_rel = 0.0;  // signed delta / Omega_m
    double infidelity = 0.0;
};

// CSV header: theta,delta_rel,infidelity
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

// CSV header: t,rx,ry,rz
void write_qeed_csv(const std::string& path, const QeedCurve& curve);

// Shortest round-trip decimal form (17 significant digits).
std::string fmt17(double x);

}  // namespace qcrl
