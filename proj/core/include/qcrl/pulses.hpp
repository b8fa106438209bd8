#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace qcrl {

using ParamVector = std::vector<double>;

enum class FourierWindow { Sin, SinSq, Gaussian };

// Pulse bases. Time is in ns, amplitudes in rad/ns.
struct PiecewiseConstant {
    std::size_t segments = 1;
};

// Omega = (sum_{k=1..N} a_k t^k) * (sum_{k=1..N} b_k (T-t)^k),
// params (a_1..a_N, b_1..b_N).
struct TaylorProduct {
    std::size_t terms = 1;
};

// Omega = W(t) * (a_0 + sum_k a_k cos(2 pi k t/T + phi_k)),
// params (a_0, a_1..a_n, phi_1..phi_n).  This phase form is the default;
// the (a_k, b_k) amplitude form is available separately.
struct WindowedFourier {
    std::size_t harmonics = 1;
    FourierWindow window = FourierWindow::Sin;
    double gaussian_sigma = 0.0;  // only for FourierWindow::Gaussian
    bool phase_form = true;       // false: (a_0, a_1..a_n, b_1..b_n)
};

// Omega = sum_{k=0..N-1} A_k Mlt_k(t), each Mlt_k normalized to unit area.
struct Morlet {
    std::size_t orders = 1;
    double ratio = 2.0;
};

struct PulseBasis {
    std::variant<PiecewiseConstant, TaylorProduct, WindowedFourier, Morlet> kind;
    double gate_time = 50.0;  // T, ns

    std::size_t param_count() const;
};

// Omega(t; A); returns 0 outside [0, T].
double eval_pulse(const PulseBasis& basis, const ParamVector& a, double t);

// Analytic partials dOmega/dA_j, length |A|.
ParamVector pulse_param_gradient(const PulseBasis& basis, const ParamVector& a, double t);

// k-th order Morlet basis function normalized so its integral over [0, T] is 1.
double morlet_basis_fn(std::size_t k, double ratio, double gate_time, double t);

// Integral of Omega over [0, T] by composite Gauss-Legendre quadrature
// (panel doubling to 1e-9 relative).
double pulse_area(const PulseBasis& basis, const ParamVector& a);

// Composite Gauss-Legendre quadrature on [lo, hi], panels doubled from
// `panels` until the result changes by less than rel_tol relatively.
double quad_gl(const std::function<double(double)>& f, double lo, double hi,
               int panels = 64, double rel_tol = 1e-9);

}  // namespace qcrl
