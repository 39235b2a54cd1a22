// Copyright 2026 The orbitlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace orbitlab {

using Complex = std::complex<double>;

template <int D>
using Mat = Eigen::Matrix<Complex, D, D>;
template <int D>
using Vec = Eigen::Matrix<Complex, D, 1>;

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;
using Mat4 = Mat<4>;
using Mat9 = Mat<9>;
using Vec3 = Vec<3>;
using Vec9 = Vec<9>;
using MatX = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// exp(-i h dt) for Hermitian h, via eigendecomposition. Exactly unitary up to
/// rounding regardless of dt.
template <int D>
Mat<D> expm_hermitian(const Mat<D>& h, double dt) {
    Eigen::SelfAdjointEigenSolver<Mat<D>> solver(h);
    const auto& vecs = solver.eigenvectors();
    Vec<D> phases;
    for (int i = 0; i < vecs.cols(); ++i) {
        const double angle = -solver.eigenvalues()(i) * dt;
        phases(i) = Complex(std::cos(angle), std::sin(angle));
    }
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

/// Gauss-Legendre sample points (fractions of a step) of the fourth-order
/// Magnus integrator.
inline constexpr double kMagnusNode1 = 0.5 - 0.28867513459481288225;
inline constexpr double kMagnusNode2 = 0.5 + 0.28867513459481288225;

/// One fourth-order Magnus step: exp(-i H_eff dt) with
/// H_eff = (H1 + H2)/2 - i (sqrt3/12) dt [H2, H1], where H1, H2 are the
/// Hamiltonians at the two Gauss nodes. H_eff is Hermitian, so every step is
/// exactly unitary.
template <int D>
Mat<D> magnus4_step(const Mat<D>& h1, const Mat<D>& h2, double dt) {
    const Mat<D> comm = h2 * h1 - h1 * h2;
    const Mat<D> heff = 0.5 * (h1 + h2) - Complex(0.0, 0.14433756729740644113 * dt) * comm;
    return expm_hermitian<D>(heff, dt);
}

/// exp(-i diag(e) dt) as a diagonal matrix.
template <int D>
Mat<D> expm_diagonal(const Eigen::Matrix<double, D, 1>& energies, double dt) {
    Mat<D> u = Mat<D>::Zero(energies.size(), energies.size());
    for (int i = 0; i < energies.size(); ++i) {
        u(i, i) = std::polar(1.0, -energies(i) * dt);
    }
    return u;
}

/// max-norm of U^dagger U - I.
template <class M>
double unitarity_deviation(const M& u) {
    const MatX g = u.adjoint() * u;
    return (g - MatX::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

/// Rotates the global phase so the first entry with modulus above `eps`
/// (row-major scan) is real and positive.
template <class M>
M phase_normalized(const M& u, double eps = 1e-9) {
    for (int r = 0; r < u.rows(); ++r) {
        for (int c = 0; c < u.cols(); ++c) {
            const double mag = std::abs(u(r, c));
            if (mag > eps) {
                return u * (std::conj(u(r, c)) / mag);
            }
        }
    }
    return u;
}

/// min over phi of max|a - e^{i phi} b|, with phi taken from tr(b^dagger a).
template <class MA, class MB>
double phase_aligned_distance(const MA& a, const MB& b) {
    const Complex overlap = (b.adjoint() * a).trace();
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
    return (MatX(a) - phase * MatX(b)).cwiseAbs().maxCoeff();
}

/// Average gate fidelity of u against target on the space spanned by target
/// (unitary overlap; leakage out of the subspace counts against it).
inline double average_gate_fidelity(const MatX& u_sub, const MatX& target) {
    const double d = static_cast<double>(target.rows());
    const MatX m = target.adjoint() * u_sub;
    const double tr2 = std::norm(m.trace());
    const double mm = (m.adjoint() * m).trace().real();
    return (mm + tr2) / (d * (d + 1.0));
}

inline double wrap_phase(double phi) {
    return std::remainder(phi, kTwoPi);
}

}  // namespace orbitlab
