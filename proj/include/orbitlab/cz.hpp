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

#include "orbitlab/linalg.hpp"
#include "orbitlab/pulse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

/// Frequency-excursion family for the adiabatic CZ. The second qudit (the
/// "moved" one) is pulled down from its idle frequency toward the
/// |11>-|02> avoided crossing, held, and returned; single-qubit phase
/// corrections are applied as frame updates afterwards.
struct CZTrajectoryParams {
    enum Index : std::size_t {
        kExcursion = 0,  // GHz, depth of the frequency move (positive = down)
        kRamp = 1,       // ns, duration of each ramp
        kHold = 2,       // ns, time spent at full excursion
        kShoulder = 3,   // 0 = smooth cosine ramp, 1 = linear ramp with sharp corners
        kFourier1 = 4,   // weight of (1 - cos 2 pi u)/2 in the ramp profile
        kFourier2 = 5,   // weight of (1 - cos 4 pi u)/2 in the ramp profile
        kPhase0 = 6,     // rad, frame correction on qudit 0
        kPhase1 = 7,     // rad, frame correction on qudit 1
    };

    std::array<double, 8> params{0.0, 10.0, 20.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    double total_time_ns = 50.0;
    double coupling_ghz = 0.03;
    /// The exchange coupling is switched by the same flux pulse that moves the
    /// qudit: it ramps linearly from 0 to coupling_ghz as the frequency offset
    /// grows from 0 to this value, so an idle qudit pair is uncoupled.
    double coupler_activation_ghz = 0.1;

    double operator[](Index i) const { return params[i]; }
    double& operator[](Index i) { return params[i]; }

    double trajectory_length() const { return 2.0 * params[kRamp] + params[kHold]; }

    void validate() const {
        for (double p : params) {
            if (!std::isfinite(p)) {
                throw std::invalid_argument("CZ trajectory parameters must be finite");
            }
        }
        if (!(coupler_activation_ghz > 0.0)) {
            throw std::invalid_argument("CZ coupler activation scale must be positive");
        }
        if (!(total_time_ns > 0.0)) {
            throw std::invalid_argument("CZ total_time must be positive");
        }
        if (!(params[kRamp] > 0.0)) {
            throw std::invalid_argument("CZ ramp time must be positive");
        }
        if (params[kHold] < 0.0) {
            throw std::invalid_argument("CZ hold time must be non-negative");
        }
        if (trajectory_length() > total_time_ns + 1e-9) {
            throw std::invalid_argument("CZ trajectory (" + std::to_string(trajectory_length()) +
                                        " ns) exceeds total_time (" + std::to_string(total_time_ns) + " ns)");
        }
    }
};

/// Ramp profile on u in [0, 1], equal to 0 at u = 0 and 1 at u = 1.
inline double cz_ramp_shape(double u, const CZTrajectoryParams& traj) {
    using P = CZTrajectoryParams;
    const double w = traj[P::kShoulder];
    const double smooth = 0.5 * (1.0 - std::cos(kPi * u));
    return (1.0 - w) * smooth + w * u + traj[P::kFourier1] * 0.5 * (1.0 - std::cos(kTwoPi * u)) +
           traj[P::kFourier2] * 0.5 * (1.0 - std::cos(2.0 * kTwoPi * u));
}

/// Frequency offset of the moved qudit from its idle point at time t, GHz.
inline double cz_frequency_offset(double t, const CZTrajectoryParams& traj) {
    using P = CZTrajectoryParams;
    const double ramp = traj[P::kRamp];
    const double hold = traj[P::kHold];
    double s = 0.0;
    if (t < 0.0 || t >= 2.0 * ramp + hold) {
        s = 0.0;
    } else if (t < ramp) {
        s = cz_ramp_shape(t / ramp, traj);
    } else if (t < ramp + hold) {
        s = 1.0;
    } else {
        s = cz_ramp_shape(1.0 - (t - ramp - hold) / ramp, traj);
    }
    return -traj[P::kExcursion] * s;
}

/// Instantaneous exchange coupling for a given frequency offset, GHz.
inline double cz_coupling(double offset_ghz, const CZTrajectoryParams& traj) {
    return traj.coupling_ghz * std::min(1.0, std::abs(offset_ghz) / traj.coupler_activation_ghz);
}

namespace detail {

inline int qudit_level(int index, int qudit) {
    return qudit == 0 ? index / 3 : index % 3;
}

// Exchange coupling conserves total excitation number, so the two-qudit
// propagator is block diagonal in these index groups.
inline const std::array<std::vector<int>, 5>& excitation_blocks() {
    static const std::array<std::vector<int>, 5> blocks = {
        std::vector<int>{0}, std::vector<int>{1, 3}, std::vector<int>{2, 4, 6}, std::vector<int>{5, 7},
        std::vector<int>{8}};
    return blocks;
}

template <int B>
void exponentiate_block(const Mat9& h, const std::vector<int>& idx, double dt, Mat9& out) {
    Mat<B> blk;
    for (int r = 0; r < B; ++r) {
        for (int c = 0; c < B; ++c) {
            blk(r, c) = h(idx[r], idx[c]);
        }
    }
    const Mat<B> u = expm_hermitian<B>(blk, dt);
    for (int r = 0; r < B; ++r) {
        for (int c = 0; c < B; ++c) {
            out(idx[r], idx[c]) = u(r, c);
        }
    }
}

inline Mat9 expm_two_qudit(const Mat9& h, double dt) {
    Mat9 u = Mat9::Zero();
    const auto& blocks = excitation_blocks();
    u(0, 0) = std::polar(1.0, -h(0, 0).real() * dt);
    u(8, 8) = std::polar(1.0, -h(8, 8).real() * dt);
    exponentiate_block<2>(h, blocks[1], dt, u);
    exponentiate_block<3>(h, blocks[2], dt, u);
    exponentiate_block<2>(h, blocks[3], dt, u);
    return u;
}

}  // namespace detail

/// Two-qudit Hamiltonian (rad/ns) in a frame rotating at qudit 0's idle
/// frequency for both qudits; exchange coupling g (a0^dag a1 + h.c.).
inline Mat9 two_qudit_hamiltonian(const TransmonParams& q0, const TransmonParams& q1, double f1_ghz,
                                  double coupling_ghz) {
    Mat9 h = Mat9::Zero();
    for (int i = 0; i < 9; ++i) {
        const int n0 = detail::qudit_level(i, 0);
        const int n1 = detail::qudit_level(i, 1);
        h(i, i) = kTwoPi * ((f1_ghz - q0.f10_ghz) * n1 + 0.5 * q0.anharmonicity_ghz * n0 * (n0 - 1) +
                            0.5 * q1.anharmonicity_ghz * n1 * (n1 - 1));
    }
    const Mat3 a = raising3().adjoint();
    const Mat3 id = Mat3::Identity();
    const Mat9 a0 = Eigen::kroneckerProduct(a, id);
    const Mat9 a1 = Eigen::kroneckerProduct(id, a);
    h += kTwoPi * coupling_ghz * (a0.adjoint() * a1 + a1.adjoint() * a0);
    return h;
}

/// Frame update exp(-i (n0 phi0 + n1 phi1)).
inline Mat9 two_qudit_frame(double phi0, double phi1) {
    Mat9 u = Mat9::Zero();
    for (int i = 0; i < 9; ++i) {
        u(i, i) = std::polar(1.0, -(detail::qudit_level(i, 0) * phi0 + detail::qudit_level(i, 1) * phi1));
    }
    return u;
}

/// CZ propagator in the qudits' idle drive frames, including the trailing
/// phase corrections.
inline Mat9 cz_unitary(const CZTrajectoryParams& traj, const TransmonParams& q0, const TransmonParams& q1,
                       double dt = kDefaultDt) {
    traj.validate();
    q0.validate();
    q1.validate();
    using P = CZTrajectoryParams;
    const int n = step_count(traj.total_time_ns, dt);
    const double h = traj.total_time_ns / n;
    Mat9 u = Mat9::Identity();
    const double end = traj.trajectory_length();
    auto ham = [&](double t) {
        const double offset = cz_frequency_offset(t, traj);
        return two_qudit_hamiltonian(q0, q1, q1.f10_ghz + offset, cz_coupling(offset, traj));
    };
    for (int j = 0; j < n; ++j) {
        if (j * h >= end) {
            // Idle tail: the Hamiltonian is constant and diagonal.
            u = detail::expm_two_qudit(ham(end), traj.total_time_ns - j * h) * u;
            break;
        }
        const Mat9 h1 = ham((j + kMagnusNode1) * h);
        const Mat9 h2 = ham((j + kMagnusNode2) * h);
        const Mat9 heff = 0.5 * (h1 + h2) - Complex(0.0, 0.14433756729740644113 * h) * (h2 * h1 - h1 * h2);
        u = detail::expm_two_qudit(heff, h) * u;
    }
    // Back to the idle frames of each qudit.
    const Mat9 frame = two_qudit_frame(0.0, -kTwoPi * (q1.f10_ghz - q0.f10_ghz) * traj.total_time_ns);
    return two_qudit_frame(traj[P::kPhase0], traj[P::kPhase1]) * frame * u;
}

inline Vec9 evolve_cz(const Eigen::VectorXcd& state, const CZTrajectoryParams& traj, const TransmonParams& q0,
                      const TransmonParams& q1, double dt = kDefaultDt) {
    if (state.size() != 9) {
        throw std::invalid_argument("evolve_cz: expected a 9-dimensional two-qudit state, got dimension " +
                                    std::to_string(state.size()));
    }
    require_normalized(state.norm(), "evolve_cz");
    return cz_unitary(traj, q0, q1, dt) * Vec9(state);
}

struct CzDiagnostics {
    double conditional_phase;  // wrapped to (-pi, pi]
    double phase_01;           // arg U(01,01) - arg U(00,00)
    double phase_10;
    double leakage_from_11;  // population left outside the computational subspace starting from |11>
    double population_02;    // |<02|U|11>|^2
    double fidelity;         // average gate fidelity vs CZ on the computational subspace (leakage penalized)
};

inline CzDiagnostics analyze_cz(const Mat9& u) {
    const std::array<int, 4> comp = {0, 1, 3, 4};
    const double p00 = std::arg(u(0, 0));
    const double p01 = std::arg(u(1, 1));
    const double p10 = std::arg(u(3, 3));
    const double p11 = std::arg(u(4, 4));
    CzDiagnostics d{};
    d.conditional_phase = wrap_phase(p11 - p10 - p01 + p00);
    d.phase_01 = wrap_phase(p01 - p00);
    d.phase_10 = wrap_phase(p10 - p00);
    double inside = 0.0;
    for (int r : comp) {
        inside += std::norm(u(r, 4));
    }
    d.leakage_from_11 = 1.0 - inside;
    d.population_02 = std::norm(u(2, 4));
    MatX sub(4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            sub(r, c) = u(comp[r], comp[c]);
        }
    }
    d.fidelity = average_gate_fidelity(sub, ideal_cz_unitary());
    return d;
}

/// Tunes the excursion so the conditional phase equals pi, then sets the
/// two frame corrections so that |01> and |10> pick up no phase. The ramp,
/// hold and shape parameters are taken from `traj` unchanged. The
/// conditional phase grows monotonically with excursion as the |11> level
/// approaches the |02> crossing from above, so it is bracketed from zero
/// excursion up to `max_excursion_ghz` and bisected.
inline CZTrajectoryParams calibrate_cz(CZTrajectoryParams traj, const TransmonParams& q0, const TransmonParams& q1,
                                       double max_excursion_ghz, double dt = kDefaultDt) {
    using P = CZTrajectoryParams;
    traj[P::kPhase0] = 0.0;
    traj[P::kPhase1] = 0.0;
    auto unwrapped_phase = [&](double excursion) {
        traj[P::kExcursion] = excursion;
        const double phase = analyze_cz(cz_unitary(traj, q0, q1, dt)).conditional_phase;
        return phase < 0.0 ? phase + kTwoPi : phase;
    };
    // Scan for the first crossing of pi, then bisect inside that bracket.
    constexpr int kScan = 64;
    double lo = 0.0;
    double hi = -1.0;
    double prev = unwrapped_phase(0.0);
    for (int i = 1; i <= kScan; ++i) {
        const double x = max_excursion_ghz * i / kScan;
        const double phase = unwrapped_phase(x);
        if (prev < kPi && phase >= kPi && phase - prev < kPi) {
            hi = x;
            break;
        }
        lo = x;
        prev = phase;
    }
    if (hi < 0.0) {
        throw std::runtime_error("calibrate_cz: conditional phase never reaches pi below excursion " +
                                 std::to_string(max_excursion_ghz) + " GHz");
    }
    for (int it = 0; it < 50 && hi - lo > 1e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        (unwrapped_phase(mid) < kPi ? lo : hi) = mid;
    }
    traj[P::kExcursion] = 0.5 * (lo + hi);
    const CzDiagnostics d = analyze_cz(cz_unitary(traj, q0, q1, dt));
    traj[P::kPhase0] = d.phase_10;
    traj[P::kPhase1] = d.phase_01;
    return traj;
}

}  // namespace orbitlab
