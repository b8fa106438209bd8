#pragma once

#include <cstddef>
#include <vector>

#include "qcrl/gradients.hpp"

namespace qcrl {

// Functionals held constant during traversal, with their target values
// captured at the beginning pulse.
struct ConstraintSet {
    std::vector<ScalarFunctional> fns;
    std::vector<double> targets;

    static ConstraintSet capture(const SystemModel& model, const std::vector<ParamVector>& a0,
                                 std::vector<ScalarFunctional> fns, std::size_t steps = 1024);
};

struct TraversalConfig {
    double dtheta_ideal = 1e-3;  // magnitude; the driver signs it per pass
    // Traversed range relative to the beginning angle theta0:
    // [theta0 + span_lo, theta0 + span_hi], span_lo <= 0 <= span_hi.
    double span_lo = 0.0;
    double span_hi = 0.0;
    std::size_t max_iters = 100000;
    double eps_irr = 1e-6;
    double step_tol_rel = 0.1;  // |dtheta_measured - dtheta_ideal| bound, relative
    std::size_t steps = 1024;   // propagation grid
    double fd_step = 1e-4;
    bool correction = false;
    std::size_t correction_max_inner = 20;
    // With correction on, a correcting step runs only when some constraint
    // has drifted beyond this relative tolerance (scale max(|target|, 1)).
    double correction_tol = 1e-3;
};

struct TraversalRecord {
    std::size_t index = 0;
    double theta = 0.0;
    std::vector<ParamVector> a;
    std::vector<double> constraint_values;  // aligned with ConstraintSet::fns
    std::vector<double> s1;                 // per model noise term
    std::vector<double> s2;                 // per noise term with an S2 constraint, else empty
    std::vector<double> undesired;          // angles along the undesired constraint axes
    double dtheta_measured = 0.0;           // 0 for the beginning record
    double ortho_residual = 0.0;            // max_i |<dA, grad R_i>| / (|dA||grad R_i|)
};

struct TraversalResult {
    std::vector<TraversalRecord> records;  // theta ascending, re-indexed
    double theta0 = 0.0;
    std::size_t beginning_index = 0;  // record holding A0
};

// One GOV step: orthogonalize grad_theta against the constraint gradients
// (modified Gram-Schmidt, near-dependent vectors dropped at 1e-10 relative
// residual) and scale the remainder so <dA, grad_theta> = dtheta_ideal.
// Throws IrregularPoint when the remainder norm falls below
// eps_irr * |grad_theta|.
ParamVector gov_step(const ParamVector& grad_theta,
                     const std::vector<ParamVector>& constraint_grads, double dtheta_ideal,
                     double eps_irr = 1e-6);

// RIPV traversal. Two stitched passes (down then up from theta0) cover the
// configured span; generator branch hints are chained step to step.
TraversalResult ripv_run(const SystemModel& model, const std::vector<ParamVector>& a0,
                         const HermitianOp& desired, const ConstraintSet& constraints,
                         const TraversalConfig& cfg);

struct OptimizeOptions {
    double w1 = 1.0;  // weight on sum_j (S1_j)^2
    double w2 = 0.0;  // weight on sum_j (S2_j)^2
    double s1_target = 2.5;
    std::size_t max_iters = 5000;
    std::size_t steps = 1024;
    double fd_step = 1e-4;
    // Extra quadratic penalty keeping the rotation off the undesired axes
    // (multi-control runs need the beginning angles there near zero).
    double undesired_weight = 0.0;
    std::vector<HermitianOp> undesired_axes;
    // With an undesired penalty, the descent only stops once every
    // undesired angle is within this tolerance (radians).
    double undesired_tol = 1e-3;
    // Quadratic penalty on max_t |Omega(t)| above amp_cap. Keeps the descent
    // from trading robustness for arbitrarily large amplitudes, which the
    // propagation grid cannot resolve.
    double amp_weight = 0.0;
    double amp_cap = 0.0;
};

// Gradient descent with Armijo backtracking on
// w1 sum (S1_j)^2 + w2 sum (S2_j)^2 [+ undesired penalty].
// Returns once every S1_j <= s1_target, or the best-found parameters after
// max_iters. Throws NoDescent when the line search fails 40 times in a row.
std::vector<ParamVector> optimize_beginning(const SystemModel& model,
                                            const std::vector<ParamVector>& a_init,
                                            const OptimizeOptions& opt = {});

// Best-effort projection back onto the level set: descent on
// (1 - F(U_sc, U(theta_target)))^2 + sum_i (R_i - R_i*)^2.
std::vector<ParamVector> correcting_step(const SystemModel& model,
                                         const std::vector<ParamVector>& a,
                                         const HermitianOp& desired, double theta_target,
                                         const ConstraintSet& constraints,
                                         std::size_t max_inner, std::size_t steps = 1024);

// Componentwise monotone piecewise-cubic interpolation of A over theta;
// exact at the knots. Throws OutOfRange for theta outside the record range.
std::vector<ParamVector> interpolate(const std::vector<TraversalRecord>& records,
                                     double theta_star);

}  // namespace qcrl
