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
#include "orbitlab/cz.hpp"
#include "orbitlab/line_response.hpp"
#include "orbitlab/linalg.hpp"
#include "orbitlab/measurement.hpp"
#include "orbitlab/pulse.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace orbitlab {

/// Incoherent error floor applied after every physical gate, on top of the
/// coherent pulse-level errors. Each channel replaces the state on the
/// qubit (computational) subspace with the maximally mixed state with the
/// given probability; populations outside the subspace are untouched.
struct NoiseParams {
    double sq_depolarizing = 0.001;
    double cz_depolarizing = 0.0067;

    static NoiseParams none() { return {0.0, 0.0}; }

    void validate() const {
        for (double p : {sq_depolarizing, cz_depolarizing}) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("depolarizing probabilities must lie in [0, 1]");
            }
        }
    }
};

/// Spurious drive seen by the victim qudit while another line plays random
/// single-qubit Clifford pulses at f10 + detuning. The pulse amplitude is
/// area_constant / gate_length so that amplitude * length stays fixed.
struct CrosstalkConfig {
    double detuning_ghz = 0.0;
    double gate_length_ns = 20.0;
    double area_constant = 0.5;
    double relative_coupling = 0.1;

    double amplitude_ghz() const { return area_constant / gate_length_ns; }

    void validate() const {
        if (!(gate_length_ns > 0.0)) {
            throw std::invalid_argument("crosstalk gate length must be positive");
        }
        if (!(area_constant > 0.0)) {
            throw std::invalid_argument("crosstalk area constant must be positive");
        }
        if (relative_coupling < 0.0) {
            throw std::invalid_argument("crosstalk relative coupling must be non-negative");
        }
    }
};

/// Full description of the simulated device. Immutable once built; every
/// simulation reads it and owns its own state.
struct DeviceModel {
    std::array<TransmonParams, 2> qubits{TransmonParams{5.0, -0.22, 3}, TransmonParams{5.6, -0.22, 3}};
    std::array<XYPulseParams, 2> xy{};
    CZTrajectoryParams cz{};
    SpamParams spam{};
    NoiseParams noise{};
    LineResponse line{{{0.015, 0.1}, {0.004, 0.01}}};  // forward distortion of qudit 0's Z line
    std::optional<LineResponse> correction{};  // predistortion filter, if any
    StepPulseParams step{};
    double step_phase_correction = 0.0;  // rad, added to the nominal virtual-Z compensation of the step
    CrosstalkConfig crosstalk{};
    double dt_ns = kDefaultDt;

    void validate() const {
        for (const auto& q : qubits) {
            q.validate();
        }
        for (const auto& p : xy) {
            p.validate();
        }
        cz.validate();
        spam.validate();
        noise.validate();
        line.validate();
        if (correction) {
            correction->validate();
        }
        step.validate();
        crosstalk.validate();
        if (!(dt_ns > 0.0)) {
            throw std::invalid_argument("integration step must be positive");
        }
    }
};

/// Calibrated defaults for the built-in device (20 ns pulses, 5.0 GHz,
/// -0.22 GHz anharmonicity): amplitude, drive frequency and DRAG coefficient
/// minimizing the combined X/2 and X infidelity, and an adiabatic CZ (15 ns
/// ramps, 20 ns hold, 55 ns slot) whose excursion gives a conditional phase
/// of pi, with frame corrections removing the single-qudit phases.
inline XYPulseParams calibrated_xy_pulse(double f10_ghz = 5.0) {
    return {0.0250864327, f10_ghz + 0.0000070086, 0.493636, 20.0};
}

inline CZTrajectoryParams calibrated_cz() {
    CZTrajectoryParams t;
    t.params = {0.3026760115, 15.0, 20.0, 0.0, 0.0, 0.0, 0.6864135962, 3.0436647122};
    t.total_time_ns = 55.0;
    t.coupling_ghz = 0.03;
    return t;
}

inline DeviceModel default_device() {
    DeviceModel d;
    d.xy[0] = calibrated_xy_pulse(d.qubits[0].f10_ghz);
    d.xy[1] = calibrated_xy_pulse(d.qubits[1].f10_ghz);
    d.cz = calibrated_cz();
    return d;
}

// ---------------------------------------------------------------------------
// Noise channels on density matrices of one or two three-level qudits.
// Basis index: 3 * level0 + level1 for two qudits (qudit 0 most significant).

namespace detail {

inline int digit(int index, int qudit, int qudits) {
    return qudits == 1 ? index : (qudit == 0 ? index / 3 : index % 3);
}

inline int with_digit(int index, int qudit, int qudits, int level) {
    if (qudits == 1) {
        return level;
    }
    return qudit == 0 ? level * 3 + index % 3 : (index / 3) * 3 + level;
}

}  // namespace detail

/// Depolarizes the qubit subspace {|0>, |1>} of one qudit with probability
/// `lambda`: rho -> (1 - lambda) rho + lambda (sum_P P rho P / 4 + L rho L),
/// with P the Paulis on the subspace and L the projector onto level 2.
template <int D>
void depolarize_qudit(Mat<D>& rho, int qudit, double lambda) {
    if (lambda <= 0.0) {
        return;
    }
    const int qudits = D == 3 ? 1 : 2;
    Mat<D> out = Mat<D>::Zero();
    for (int a = 0; a < D; ++a) {
        for (int b = 0; b < D; ++b) {
            const int la = detail::digit(a, qudit, qudits);
            const int lb = detail::digit(b, qudit, qudits);
            if (la == 2 && lb == 2) {
                out(a, b) = rho(a, b);
            } else if (la < 2 && lb < 2 && la == lb) {
                // Partial trace over the qubit block, spread evenly.
                const int a0 = detail::with_digit(a, qudit, qudits, 0);
                const int b0 = detail::with_digit(b, qudit, qudits, 0);
                const int a1 = detail::with_digit(a, qudit, qudits, 1);
                const int b1 = detail::with_digit(b, qudit, qudits, 1);
                out(a, b) = 0.5 * (rho(a0, b0) + rho(a1, b1));
            }
        }
    }
    rho = (1.0 - lambda) * rho + lambda * out;
}

/// Depolarizes the four-dimensional computational subspace of two qudits.
inline void depolarize_pair(Mat9& rho, double lambda) {
    if (lambda <= 0.0) {
        return;
    }
    constexpr std::array<int, 4> comp = {0, 1, 3, 4};
    auto in_comp = [](int i) { return i % 3 < 2 && i / 3 < 2; };
    Complex trace = 0.0;
    for (int i : comp) {
        trace += rho(i, i);
    }
    Mat9 out = Mat9::Zero();
    for (int a = 0; a < 9; ++a) {
        for (int b = 0; b < 9; ++b) {
            if (!in_comp(a) && !in_comp(b)) {
                out(a, b) = rho(a, b);
            }
        }
    }
    for (int i : comp) {
        out(i, i) = 0.25 * trace;
    }
    rho = (1.0 - lambda) * rho + lambda * out;
}

/// Initial state of `qudits` qudits with independent preparation errors.
template <int D>
Mat<D> prepared_state(const SpamParams& spam) {
    const Mat3 one = prepared_qudit(spam);
    if constexpr (D == 3) {
        return one;
    } else {
        return Eigen::kroneckerProduct(one, one).eval();
    }
}

/// Virtual Z frame update on one qudit: level n picks up exp(i n theta).
inline Mat3 virtual_z(double theta) {
    Mat3 z = Mat3::Zero();
    z(0, 0) = 1.0;
    z(1, 1) = std::polar(1.0, theta);
    z(2, 2) = std::polar(1.0, 2.0 * theta);
    return z;
}

}  // namespace orbitlab
