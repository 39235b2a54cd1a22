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

#include "orbitlab/clifford.hpp"
#include "orbitlab/linalg.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace orbitlab {

/// Default piecewise-constant integration step, ns.
inline constexpr double kDefaultDt = 0.05;

struct TransmonParams {
    double f10_ghz = 5.0;
    double anharmonicity_ghz = -0.22;
    int levels = 3;

    double f21_ghz() const { return f10_ghz + anharmonicity_ghz; }

    void validate() const {
        if (levels != 3) {
            throw std::invalid_argument("transmon model supports exactly 3 levels, got " + std::to_string(levels));
        }
        if (!(std::abs(anharmonicity_ghz) > 0.0)) {
            throw std::invalid_argument("anharmonicity must be nonzero");
        }
    }
};

/// Cosine-envelope microwave pulse with a derivative quadrature term.
/// `amplitude_ghz` is the peak Rabi frequency of the pi/2 pulse; pi pulses
/// use twice the amplitude with the same envelope.
struct XYPulseParams {
    double amplitude_ghz = 0.025;
    double drive_frequency_ghz = 5.0;
    double drag = 0.5;
    double length_ns = 20.0;

    void validate() const {
        if (!(length_ns > 0.0)) {
            throw std::invalid_argument("XY pulse length must be positive");
        }
    }
};

/// Number of integration steps for a segment; durations are split evenly.
inline int step_count(double duration_ns, double dt) {
    return std::max(1, static_cast<int>(std::lround(duration_ns / dt)));
}

/// Raising operator on a 3-level system (matrix elements 1 and sqrt 2).
inline Mat3 raising3() {
    Mat3 a = Mat3::Zero();
    a(1, 0) = 1.0;
    a(2, 1) = std::sqrt(2.0);
    return a;
}

/// Complex drive envelope (rad/ns) at time t within a gate: in-phase cosine
/// envelope plus the quadrature derivative term, rotated by the gate axis.
inline Complex xy_envelope(double t, double scale, double axis_phase, const XYPulseParams& pulse,
                           const TransmonParams& qubit) {
    if (scale == 0.0) {
        return {0.0, 0.0};
    }
    const double w = kTwoPi / pulse.length_ns;
    const double peak = scale * pulse.amplitude_ghz;
    const double omega = kTwoPi * 0.5 * peak * (1.0 - std::cos(w * t));
    const double omega_dot = kTwoPi * 0.5 * peak * w * std::sin(w * t);
    const double quadrature = -pulse.drag * omega_dot / (kTwoPi * qubit.anharmonicity_ghz);
    return std::polar(1.0, axis_phase) * Complex(omega, quadrature);
}

/// Rotating-frame Hamiltonian (rad/ns) at drive frequency f:
/// diag(0, d, 2d + anharm) + (eps a^dag + eps^* a)/2 with d = 2 pi (f10 - f + z).
inline Mat3 transmon_hamiltonian(const TransmonParams& qubit, double frame_ghz, double z_detuning_ghz,
                                 Complex drive) {
    const double d = kTwoPi * (qubit.f10_ghz - frame_ghz + z_detuning_ghz);
    Mat3 h = Mat3::Zero();
    h(1, 1) = d;
    h(2, 2) = 2.0 * d + kTwoPi * qubit.anharmonicity_ghz;
    const double r2 = std::sqrt(2.0);
    h(1, 0) = 0.5 * drive;
    h(0, 1) = 0.5 * std::conj(drive);
    h(2, 1) = 0.5 * r2 * drive;
    h(1, 2) = 0.5 * r2 * std::conj(drive);
    return h;
}

/// Propagator of one physical single-qubit gate in the drive frame.
inline Mat3 xy_gate_unitary(GateKind gate, const XYPulseParams& pulse, const TransmonParams& qubit,
                            double dt = kDefaultDt) {
    pulse.validate();
    const RotationSpec spec = rotation_spec(gate);
    const int n = step_count(pulse.length_ns, dt);
    const double h = pulse.length_ns / n;
    const double scale = spec.quarter_turns;
    Mat3 u = Mat3::Identity();
    auto ham = [&](double t) {
        return transmon_hamiltonian(qubit, pulse.drive_frequency_ghz, 0.0,
                                    xy_envelope(t, scale, spec.axis_phase, pulse, qubit));
    };
    for (int j = 0; j < n; ++j) {
        u = magnus4_step<3>(ham((j + kMagnusNode1) * h), ham((j + kMagnusNode2) * h), h) * u;
    }
    return u;
}

inline void require_normalized(double norm, const char* what) {
    if (std::abs(norm - 1.0) > 1e-10) {
        throw std::invalid_argument(std::string(what) + ": state is not normalized (norm " + std::to_string(norm) +
                                    ")");
    }
}

/// Applies the X/2 pulse defined by `pulse` to a 3-level state.
inline Vec3 evolve_xy_pulse(const Vec3& state, const XYPulseParams& pulse, const TransmonParams& qubit,
                            double dt = kDefaultDt) {
    require_normalized(state.norm(), "evolve_xy_pulse");
    qubit.validate();
    return xy_gate_unitary(GateKind::X90, pulse, qubit, dt) * state;
}

/// Propagators for every physical single-qubit gate of one qudit.
struct QuditGateSet {
    std::array<Mat3, 7> gates;

    const Mat3& operator[](GateKind g) const { return gates.at(static_cast<std::size_t>(g)); }
};

inline QuditGateSet compile_gate_set(const XYPulseParams& pulse, const TransmonParams& qubit,
                                     double dt = kDefaultDt) {
    qubit.validate();
    QuditGateSet set;
    for (GateKind g : kSingleQubitGates) {
        set.gates.at(static_cast<std::size_t>(g)) = xy_gate_unitary(g, pulse, qubit, dt);
    }
    return set;
}

/// Embeds a qubit unitary into the 3-level space (level 2 untouched).
inline Mat3 embed_qubit(const Mat2& u) {
    Mat3 e = Mat3::Identity();
    e.topLeftCorner<2, 2>() = u;
    return e;
}

/// Average gate fidelity of a qudit propagator against the ideal gate on the
/// computational subspace, with the frame phase of |1> removed first.
inline double gate_fidelity_in_subspace(const Mat3& u, GateKind gate) {
    const MatX sub = u.topLeftCorner<2, 2>();
    return average_gate_fidelity(sub, ideal_single_qubit_unitary(gate));
}

}  // namespace orbitlab
