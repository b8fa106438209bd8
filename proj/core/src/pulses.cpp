#include "qcrl/pulses.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "qcrl/errors.hpp"

namespace qcrl {

namespace {

constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

double gl_pass(const std::function<double(double)>& f, double lo, double hi, int panels) {
    const double h = (hi - lo) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        const double mid = a + 0.5 * h;
        double local = 0.0;
        for (int i = 0; i < 8; ++i) {
            local += kGlWeight[i] * f(mid + 0.5 * h * kGlNode[i]);
        }
        sum += 0.5 * h * local;
    }
    return sum;
}

// Dimensionless Morlet area integral over tau in [-1/2, 1/2], cached per (k, r).
double morlet_area_factor(std::size_t k, double r) {
    static std::map<std::pair<std::size_t, double>, double> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({k, r});
    if (it != cache.end()) return it->second;
    const double freq = (2.0 * k + 1.0) * kPi;
    const double val = quad_gl(
        [&](double tau) { return std::exp(-2.0 * r * r * tau * tau) * std::cos(freq * tau); },
        -0.5, 0.5, 64, 1e-12);
    cache[{k, r}] = val;
    return val;
}

double window_value(const WindowedFourier& wf, double tn, double gate_time, double t) {
    switch (wf.window) {
        case FourierWindow::Sin:
            return std::sin(kPi * tn);
        case FourierWindow::SinSq: {
            const double s = std::sin(kPi * tn);
            return s * s;
        }
        case FourierWindow::Gaussian: {
            const double s = wf.gaussian_sigma;
            const double x = t - 0.5 * gate_time;
            return std::exp(-x * x / (2.0 * s * s)) / (s * std::sqrt(2.0 * kPi));
        }
    }
    return 0.0;
}

}  // namespace

double quad_gl(const std::function<double(double)>& f, double lo, double hi, int panels,
               double rel_tol) {
    double prev = gl_pass(f, lo, hi, panels);
    for (int iter = 0; iter < 12; ++iter) {
        panels *= 2;
        const double next = gl_pass(f, lo, hi, panels);
        if (std::abs(next - prev) <= rel_tol * std::max(std::abs(next), 1e-300)) {
            return next;
        }
        prev = next;
    }
    return prev;
}

std::size_t PulseBasis::param_count() const {
    return std::visit(
        [](const auto& k) -> std::size_t {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, PiecewiseConstant>) {
                return k.segments;
            } else if constexpr (std::is_same_v<T, TaylorProduct>) {
                return 2 * k.terms;
            } else if constexpr (std::is_same_v<T, WindowedFourier>) {
                return 2 * k.harmonics + 1;
            } else {
                return k.orders;
            }
        },
        kind);
}

double morlet_basis_fn(std::size_t k, double ratio, double gate_time, double t) {
    if (ratio <= 0.0) throw ContractViolation("morlet_basis_fn: ratio must be positive");
    const double tau = (t - 0.5 * gate_time) / gate_time;
    const double c = 1.0 / (gate_time * morlet_area_factor(k, ratio));
    return c * std::exp(-2.0 * ratio * ratio * tau * tau) *
           std::cos((2.0 * k + 1.0) * kPi * tau);
}

double eval_pulse(const PulseBasis& basis, const ParamVector& a, double t) {
    const double T = basis.gate_time;
    if (a.size() != basis.param_count()) {
        throw ContractViolation("eval_pulse: parameter vector length mismatch");
    }
    if (t < 0.0 || t > T) return 0.0;
    const double tn = t / T;
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, PiecewiseConstant>) {
                auto idx = static_cast<std::size_t>(tn * static_cast<double>(k.segments));
                if (idx >= k.segments) idx = k.segments - 1;
                return a[idx];
            } else if constexpr (std::is_same_v<K, TaylorProduct>) {
                double left = 0.0, right = 0.0;
                double tp = t, sp = T - t;
                for (std::size_t i = 0; i < k.terms; ++i) {
                    left += a[i] * tp;
                    right += a[k.terms + i] * sp;
                    tp *= t;
                    sp *= (T - t);
                }
                return left * right;
            } else if constexpr (std::is_same_v<K, WindowedFourier>) {
                const std::size_t n = k.harmonics;
                double s = a[0];
                if (k.phase_form) {
                    for (std::size_t j = 1; j <= n; ++j) {
                        s += a[j] * std::cos(2.0 * kPi * j * tn + a[n + j]);
                    }
                } else {
                    for (std::size_t j = 1; j <= n; ++j) {
                        s += a[j] * std::cos(2.0 * kPi * j * tn) +
                             a[n + j] * std::sin(2.0 * kPi * j * tn);
                    }
                }
                return window_value(k, tn, T, t) * s;
            } else {
                double s = 0.0;
                for (std::size_t j = 0; j < k.orders; ++j) {
                    s += a[j] * morlet_basis_fn(j, k.ratio, T, t);
                }
                return s;
            }
        },
        basis.kind);
}

ParamVector pulse_param_gradient(const PulseBasis& basis, const ParamVector& a, double t) {
    const double T = basis.gate_time;
    if (a.size() != basis.param_count()) {
        throw ContractViolation("pulse_param_gradient: parameter vector length mismatch");
    }
    ParamVector g(a.size(), 0.0);
    if (t < 0.0 || t > T) return g;
    const double tn = t / T;
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, PiecewiseConstant>) {
                auto idx = static_cast<std::size_t>(tn * static_cast<double>(k.segments));
                if (idx >= k.segments) idx = k.segments - 1;
                g[idx] = 1.0;
            } else if constexpr (std::is_same_v<K, TaylorProduct>) {
                double left = 0.0, right = 0.0;
                double tp = t, sp = T - t;
                for (std::size_t i = 0; i < k.terms; ++i) {
                    left += a[i] * tp;
                    right += a[k.terms + i] * sp;
                    tp *= t;
                    sp *= (T - t);
                }
                tp = t;
                sp = T - t;
                for (std::size_t i = 0; i < k.terms; ++i) {
                    g[i] = tp * right;
                    g[k.terms + i] = left * sp;
                    tp *= t;
                    sp *= (T - t);
                }
            } else if constexpr (std::is_same_v<K, WindowedFourier>) {
                const std::size_t n = k.harmonics;
                const double w = window_value(k, tn, T, t);
                g[0] = w;
                if (k.phase_form) {
                    for (std::size_t j = 1; j <= n; ++j) {
                        const double arg = 2.0 * kPi * j * tn + a[n + j];
                        g[j] = w * std::cos(arg);
                        g[n + j] = -w * a[j] * std::sin(arg);
                    }
                } else {
                    for (std::size_t j = 1; j <= n; ++j) {
                        g[j] = w * std::cos(2.0 * kPi * j * tn);
                        g[n + j] = w * std::sin(2.0 * kPi * j * tn);
                    }
                }
            } else {
                for (std::size_t j = 0; j < k.orders; ++j) {
                    g[j] = morlet_basis_fn(j, k.ratio, T, t);
                }
            }
        },
        basis.kind);
    return g;
}

double pulse_area(const PulseBasis& basis, const ParamVector& a) {
    return quad_gl([&](double t) { return eval_pulse(basis, a, t); }, 0.0, basis.gate_time);
}

}  // namespace qcrl
