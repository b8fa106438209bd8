#include <doctest.h>

#include <cmath>

#include "qcrl/pulses.hpp"
#include "qcrl/rng.hpp"

using namespace qcrl;

namespace {

PulseBasis wf_basis(std::size_t harmonics = 4, FourierWindow window = FourierWindow::Sin,
                    double T = 50.0) {
    PulseBasis b;
    WindowedFourier wf;
    wf.harmonics = harmonics;
    wf.window = window;
    b.kind = wf;
    b.gate_time = T;
    return b;
}

ParamVector random_params(Rng& rng, std::size_t n, double scale = 0.5) {
    ParamVector a(n);
    for (auto& x : a) x = rng.uniform(-scale, scale);
    return a;
}

// Composite Simpson on a fine fixed grid; independent of the quadrature
// used inside the library.
double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("eval_pulse windowed-Fourier basics") {
    const auto b = wf_basis();
    ParamVector a(9, 0.0);
    a[0] = 1.0;
    CHECK(eval_pulse(b, a, 25.0) == doctest::Approx(1.0));
    CHECK(eval_pulse(b, a, 0.0) == doctest::Approx(0.0));
    CHECK(eval_pulse(b, a, 50.0) == doctest::Approx(0.0).epsilon(1e-12));

    Rng rng(1);
    const auto ar = random_params(rng, 9);
    CHECK(eval_pulse(b, ar, -1.0) == 0.0);
    CHECK(eval_pulse(b, ar, 51.0) == 0.0);
    CHECK(std::abs(eval_pulse(b, ar, 0.0)) < 1e-12);
}

TEST_CASE("eval_pulse piecewise segments") {
    PulseBasis b;
    b.kind = PiecewiseConstant{3};
    b.gate_time = 30.0;
    const ParamVector a{0.2, 0.5, 0.1};
    CHECK(eval_pulse(b, a, 5.0) == doctest::Approx(0.2));
    CHECK(eval_pulse(b, a, 15.0) == doctest::Approx(0.5));
    CHECK(eval_pulse(b, a, 29.0) == doctest::Approx(0.1));
}

TEST_CASE("pulse_param_gradient matches finite differences") {
    Rng rng(2);
    std::vector<PulseBasis> bases;
    bases.push_back(wf_basis(4, FourierWindow::Sin));
    bases.push_back(wf_basis(3, FourierWindow::SinSq));
    {
        PulseBasis b;
        b.kind = TaylorProduct{3};
        b.gate_time = 50.0;
        bases.push_back(b);
    }
    {
        PulseBasis b;
        b.kind = Morlet{4, 2.0};
        b.gate_time = 50.0;
        bases.push_back(b);
    }
    {
        PulseBasis b;
        WindowedFourier wf;
        wf.harmonics = 4;
        wf.phase_form = false;
        b.kind = wf;
        b.gate_time = 50.0;
        bases.push_back(b);
    }

    const double h = 1e-6;
    for (const auto& b : bases) {
        for (int rep = 0; rep < 25; ++rep) {
            ParamVector a = random_params(rng, b.param_count());
            const double t = rng.uniform(0.0, b.gate_time);
            const ParamVector g = pulse_param_gradient(b, a, t);
            for (std::size_t j = 0; j < a.size(); ++j) {
                const double a0 = a[j];
                a[j] = a0 + h;
                const double fp = eval_pulse(b, a, t);
                a[j] = a0 - h;
                const double fm = eval_pulse(b, a, t);
                a[j] = a0;
                const double fd = (fp - fm) / (2.0 * h);
                // FD rounding floor: |fp - fm| carries ~2 ulp of |f|,
                // amplified by 1/(2h). Relevant for the Taylor basis where
                // |f| reaches ~1e7 at T = 50.
                const double noise =
                    5e-10 * std::max({std::abs(fp), std::abs(fm), 1.0});
                CHECK(std::abs(g[j] - fd) <= 1e-8 * std::max(1.0, std::abs(fd)) + noise);
            }
        }
    }
}

TEST_CASE("windowed-Fourier phase partials vanish at zero amplitude") {
    const auto b = wf_basis();
    ParamVector a(9, 0.0);
    a[0] = 1.0;
    a[5] = 0.4;  // phi_1 with a_1 = 0
    const auto g = pulse_param_gradient(b, a, 25.0);
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[5] == doctest::Approx(0.0));
}

TEST_CASE("morlet basis functions: unit area, symmetry, center sign") {
    const double T = 50.0;
    for (std::size_t k = 0; k <= 5; ++k) {
        const double area = simpson([&](double t) { return morlet_basis_fn(k, 2.0, T, t); },
                                    0.0, T);
        CHECK(area == doctest::Approx(1.0).epsilon(1e-8));
        // The raw Gaussian-cosine area alternates sign from k = 3 at r = 2,
        // so unit-area normalization flips the center sign there.
        if (k <= 2) CHECK(morlet_basis_fn(k, 2.0, T, T / 2) > 0.0);
        for (double s : {3.0, 11.5, 20.0}) {
            CHECK(morlet_basis_fn(k, 2.0, T, T / 2 + s) ==
                  doctest::Approx(morlet_basis_fn(k, 2.0, T, T / 2 - s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("pulse_area closed forms") {
    const auto b = wf_basis();
    const double T = b.gate_time;
    ParamVector a(9, 0.0);

    SUBCASE("all zero") { CHECK(pulse_area(b, a) == doctest::Approx(0.0)); }
    SUBCASE("sin window dc term") {
        a[0] = 1.3;
        CHECK(pulse_area(b, a) == doctest::Approx(1.3 * 2.0 * T / M_PI).epsilon(1e-9));
    }
    SUBCASE("2 pi rotation amplitude") {
        a[0] = M_PI * M_PI / T;
        CHECK(pulse_area(b, a) == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    }
}

TEST_CASE("sin^2 window vanishes with its derivative at the boundaries") {
    const auto b = wf_basis(3, FourierWindow::SinSq);
    Rng rng(3);
    const auto a = random_params(rng, b.param_count());
    const double T = b.gate_time;
    for (double t0 : {0.0, T}) {
        CHECK(std::abs(eval_pulse(b, a, t0)) < 1e-12);
        const double inward = (t0 == 0.0) ? 1e-7 : -1e-7;
        const double fd = (eval_pulse(b, a, t0 + inward) - eval_pulse(b, a, t0)) / inward;
        CHECK(std::abs(fd) < 1e-5);
    }
}

TEST_CASE("amplitude linearity at fixed phases") {
    const auto b = wf_basis();
    Rng rng(4);
    ParamVector a1 = random_params(rng, 9);
    ParamVector a2 = random_params(rng, 9);
    for (std::size_t j = 5; j < 9; ++j) a2[j] = a1[j];  // shared phases
    ParamVector sum = a1;
    for (std::size_t j = 0; j < 5; ++j) sum[j] += a2[j];
    for (double t : {7.0, 19.0, 33.3, 48.0}) {
        CHECK(eval_pulse(b, sum, t) ==
              doctest::Approx(eval_pulse(b, a1, t) + eval_pulse(b, a2, t)).epsilon(1e-10));
    }
}

TEST_CASE("Taylor product boundary vanishing order") {
    PulseBasis b;
    b.kind = TaylorProduct{3};
    b.gate_time = 50.0;
    // Lowest kept power K+1 = 2: a_1 = b_1 = 0.
    ParamVector a{0.0, 1.0, 0.5, 0.0, 0.7, 0.2};
    for (double eps : {1e-3 * 50.0, 1e-4 * 50.0}) {
        const double v = std::abs(eval_pulse(b, a, eps));
        // |Omega(eps)| <= C eps^2; the right factor contributes up to
        // ~0.7 T^2 + 0.2 T^3 ~ 2.7e4 at t = 0.
        CHECK(v <= 1e5 * eps * eps);
    }
}
