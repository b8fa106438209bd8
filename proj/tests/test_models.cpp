#include <doctest.h>

#include <cmath>

#include "qcrl/errors.hpp"
#include "qcrl/models.hpp"
#include "qcrl/rng.hpp"

using namespace qcrl;

namespace {

PulseBasis wf_basis(double T = 50.0) {
    PulseBasis b;
    WindowedFourier wf;
    wf.harmonics = 4;
    b.kind = wf;
    b.gate_time = T;
    return b;
}

PulseBasis const_basis(double T = 50.0) {
    PulseBasis b;
    b.kind = PiecewiseConstant{1};
    b.gate_time = T;
    return b;
}

// Rows/cols {1, 2} = span{|01>, |10>} in the |00>, |01>, |10>, |11> ordering.
Matrix sub_block(const Matrix& u4) {
    Matrix s(2, 2);
    s << u4(1, 1), u4(1, 2), u4(2, 1), u4(2, 2);
    return s;
}

}  // namespace

TEST_CASE("single-qubit assembly") {
    const auto b = wf_basis();

    SUBCASE("x control, z noise") {
        const auto m = build_single_qubit({'x'}, {'z'}, b);
        CHECK(m.dim == 2);
        CHECK(m.controls.size() == 1);
        CHECK(m.noises.size() == 1);
        CHECK((m.controls[0].op.matrix() - 0.5 * pauli_x()).norm() < 1e-15);
        CHECK((m.noises[0].op.matrix() - pauli_z()).norm() < 1e-15);
        CHECK(m.drift.matrix().norm() == 0.0);
    }

    SUBCASE("xy control, xyz noise has 18 parameters") {
        const auto m = build_single_qubit({'x', 'y'}, {'x', 'y', 'z'}, b);
        std::size_t params = 0;
        for (const auto& c : m.controls) params += c.basis.param_count();
        CHECK(params == 18);
        CHECK(m.noises.size() == 3);
    }

    SUBCASE("empty lists rejected") {
        CHECK_THROWS_AS(build_single_qubit({}, {'z'}, b), ContractViolation);
        CHECK_THROWS_AS(build_single_qubit({'x'}, {}, b), ContractViolation);
        CHECK_THROWS_AS(build_single_qubit({'x'}, {'q'}, b), ContractViolation);
    }
}

TEST_CASE("presets") {
    const auto b = wf_basis();
    for (const char* name : {"sq_x_z", "sq_xy_xyz", "tq_xy_detuning"}) {
        const auto gp = preset(name, b);
        CHECK(gp.name == name);
        // Normalization Tr(sigma^2) = 2 makes the extracted angle of a
        // positive-area pulse equal the pulse area.
        CHECK((gp.desired.matrix() * gp.desired.matrix()).trace().real() ==
              doctest::Approx(2.0).epsilon(1e-14));
        for (const auto& u : gp.undesired) {
            CHECK((u.matrix() * u.matrix()).trace().real() ==
                  doctest::Approx(2.0).epsilon(1e-14));
            CHECK(std::abs((gp.desired.matrix() * u.matrix()).trace()) < 1e-14);
        }
        CHECK(!gp.undesired.empty());
    }
    CHECK_THROWS_AS(preset("nope", b), ContractViolation);
}

TEST_CASE("two-qubit subspace isomorphism for arbitrary pulses") {
    Rng rng(61);
    const auto b = wf_basis();
    const auto m4 = build_two_qubit_xy(b);
    const auto m2 = build_single_qubit({'x'}, {'z'}, b);

    for (int rep = 0; rep < 10; ++rep) {
        ParamVector v(9);
        for (auto& x : v) x = rng.uniform(-0.3, 0.3);
        const std::vector<ParamVector> a{v};
        const double delta = rng.uniform(-0.1, 0.1);

        const Matrix u4 = noisy_propagate(m4, a, {delta}, 512).matrix();
        const Matrix u2 = noisy_propagate(m2, a, {delta}, 512).matrix();

        CHECK((sub_block(u4) - u2).norm() <= 1e-10);
        CHECK(std::abs(u4(0, 0) - 1.0) <= 1e-12);
        CHECK(std::abs(u4(3, 3) - 1.0) <= 1e-12);
        CHECK(std::abs(u4(0, 1)) + std::abs(u4(0, 2)) + std::abs(u4(0, 3)) <= 1e-12);
        CHECK(std::abs(u4(3, 0)) + std::abs(u4(3, 1)) + std::abs(u4(3, 2)) <= 1e-12);
    }
}

TEST_CASE("area-pi pulse gives the iSWAP block") {
    // U(T) on span{|01>, |10>} is exp(-i (area/2) sx); at area pi that is
    // -i sx, the iSWAP block up to the overall sign convention of exp(-iHt).
    const auto m4 = build_two_qubit_xy(const_basis());
    const double T = 50.0;
    const std::vector<ParamVector> a{{M_PI / T}};
    const Matrix u4 = propagate(m4, a, 256).final_unitary().matrix();

    CHECK(std::abs(u4(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(u4(3, 3) - 1.0) < 1e-12);
    const Matrix s = sub_block(u4);
    CHECK(std::abs(s(0, 0)) < 1e-12);
    CHECK(std::abs(s(1, 1)) < 1e-12);
    CHECK(std::abs(s(0, 1) - Complex(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(s(1, 0) - Complex(0.0, -1.0)) < 1e-12);

    SUBCASE("noiseless fidelity against the extracted rotation is 1") {
        const auto gp = preset("tq_xy_detuning", const_basis());
        const auto target = mat_exp(gp.desired, 0.5 * M_PI).matrix();
        CHECK(gate_fidelity(u4, target) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("four-level infidelity never exceeds the two-level one") {
    // Half the levels are noise-free, so embedding the same pulse can only
    // reduce the average infidelity.
    const auto m4 = build_two_qubit_xy(const_basis());
    const auto m2 = build_single_qubit({'x'}, {'z'}, const_basis());
    const double T = 50.0;
    const std::vector<ParamVector> a{{M_PI / T}};
    const double omega_max = M_PI / T;

    const Matrix u4 = propagate(m4, a, 512).final_unitary().matrix();
    const Matrix u2 = propagate(m2, a, 512).final_unitary().matrix();

    for (int k = -12; k <= 12; ++k) {
        if (k == 0) continue;
        const double delta =
            (k > 0 ? 1.0 : -1.0) * 0.05 * omega_max *
            std::pow(10.0, (std::abs(k) - 12) / 4.0);
        const double f4 = gate_fidelity(u4, noisy_propagate(m4, a, {delta}, 512).matrix());
        const double f2 = gate_fidelity(u2, noisy_propagate(m2, a, {delta}, 512).matrix());
        CHECK(1.0 - f4 <= 1.0 - f2 + 1e-12);
    }
}
