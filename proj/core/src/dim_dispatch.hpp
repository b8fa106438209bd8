#pragma once

#include <Eigen/Dense>
#include <utility>

#include "qcrl/operators.hpp"

namespace qcrl::detail {

template <int N>
using Mat = Eigen::Matrix<Complex, N, N>;

// Runs f with a compile-time dimension tag so the hot loops get
// fixed-size (allocation-free) matrix arithmetic for the qubit sizes
// that dominate in practice.
template <typename F>
decltype(auto) dispatch_dim(Eigen::Index d, F&& f) {
    switch (d) {
        case 2:
            return std::forward<F>(f)(std::integral_constant<int, 2>{});
        case 4:
            return std::forward<F>(f)(std::integral_constant<int, 4>{});
        default:
            return std::forward<F>(f)(std::integral_constant<int, Eigen::Dynamic>{});
    }
}

// exp(-i s H) into `out` for Hermitian H; closed form for N == 2.
template <int N>
inline void expm_herm(const Mat<N>& h, double s, Mat<N>& out) {
    if constexpr (N == 2) {
        const Complex i{0.0, 1.0};
        const double c0 = 0.5 * std::real(h(0, 0) + h(1, 1));
        const double cx = std::real(h(0, 1));
        const double cy = std::imag(h(1, 0));
        const double cz = 0.5 * std::real(h(0, 0) - h(1, 1));
        const double r = std::sqrt(cx * cx + cy * cy + cz * cz);
        const Complex phase = std::exp(-i * (s * c0));
        if (r == 0.0) {
            out.setZero();
            out(0, 0) = phase;
            out(1, 1) = phase;
            return;
        }
        const double c = std::cos(s * r);
        const double sn = std::sin(s * r) / r;
        out(0, 0) = phase * Complex(c, -sn * cz);
        out(1, 1) = phase * Complex(c, sn * cz);
        out(0, 1) = phase * (-i * sn * Complex(cx, -cy));
        out(1, 0) = phase * (-i * sn * Complex(cx, cy));
    } else {
        Eigen::SelfAdjointEigenSolver<Mat<N>> es(h);
        const auto& lam = es.eigenvalues();
        Eigen::Matrix<Complex, N, 1> phases(lam.size());
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            phases(i) = std::exp(Complex(0.0, -s * lam(i)));
        }
        out = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
}

}  // namespace qcrl::detail
