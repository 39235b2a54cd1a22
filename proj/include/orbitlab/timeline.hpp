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
#include "orbitlab/device.hpp"
#include "orbitlab/line_response.hpp"
#include "orbitlab/linalg.hpp"
#include "orbitlab/pulse.hpp"
#include "orbitlab/seed.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace orbitlab {

/// One scheduled operation on the victim qudit's time axis.
struct TimelineEvent {
    enum class Kind { kGate, kStep };
    Kind kind = Kind::kGate;
    GateKind gate = GateKind::I;
    double start_ns = 0.0;
    double duration_ns = 0.0;
};

/// Victim schedule plus the extra fields acting on it: a Z-line detuning
/// waveform (GHz, on the simulation grid) and an additive complex drive
/// from another control line (rad/ns, already in the victim frame).
struct Timeline {
    std::vector<TimelineEvent> events;
    double total_ns = 0.0;
    std::vector<double> z_detuning;  // empty = none
    std::vector<Complex> extra_drive;  // empty = none
};

/// Lays out an RB sequence back to back on qudit 0: every physical gate takes
/// one pulse length, an interleaved "STEP" takes the step duration.
inline Timeline schedule_sequence(const RbSequence& seq, const DeviceModel& device) {
    if (seq.qubit_count != 1) {
        throw std::invalid_argument("timeline simulation supports single-qudit sequences only");
    }
    const double tg = device.xy[0].length_ns;
    Timeline tl;
    double t = 0.0;
    auto add_clifford = [&](std::uint32_t index) {
        for (const PhysicalOp& op : seq.group()[index].decomposition) {
            tl.events.push_back({TimelineEvent::Kind::kGate, op.gate, t, tg});
            t += tg;
        }
    };
    for (std::uint32_t c : seq.elements) {
        add_clifford(c);
        if (seq.interleaved) {
            if (seq.interleaved->label == "STEP") {
                tl.events.push_back({TimelineEvent::Kind::kStep, GateKind::I, t, device.step.duration_ns});
                t += device.step.duration_ns;
            } else if (seq.interleaved->label != "IDLE") {
                const auto g = parse_gate_label(seq.interleaved->label);
                tl.events.push_back({TimelineEvent::Kind::kGate, *g, t, tg});
                t += tg;
            }
        }
    }
    add_clifford(seq.recovery);
    tl.total_ns = t;
    return tl;
}

/// Number of grid samples covering the timeline.
inline std::size_t timeline_samples(const Timeline& tl, double dt) {
    return static_cast<std::size_t>(std::ceil(tl.total_ns / dt - 1e-9));
}

/// Fills `z_detuning` with the Z-line waveform the victim sees: the ideal
/// rectangular steps of every STEP event, predistorted by the device's
/// correction filter (if any) and then distorted by its line.
inline void attach_step_waveform(Timeline& tl, const DeviceModel& device) {
    const double dt = device.dt_ns;
    Waveform ideal{dt, std::vector<double>(std::max<std::size_t>(timeline_samples(tl, dt), 1), 0.0)};
    bool any = false;
    for (const auto& e : tl.events) {
        if (e.kind != TimelineEvent::Kind::kStep) {
            continue;
        }
        any = true;
        const auto begin = static_cast<std::size_t>(std::lround(e.start_ns / dt));
        const auto end = static_cast<std::size_t>(std::lround((e.start_ns + e.duration_ns) / dt));
        for (std::size_t n = begin; n < end && n < ideal.samples.size(); ++n) {
            ideal.samples[n] = device.step.detuning_ghz;
        }
    }
    if (!any) {
        tl.z_detuning.clear();
        return;
    }
    tl.z_detuning = line_output(ideal, device.line, device.correction ? &*device.correction : nullptr).samples;
}

/// Classical random-Clifford pulse train on another line, seen by the victim
/// through `relative_coupling`, as a complex drive on the victim grid.
inline std::vector<Complex> crosstalk_drive(const CrosstalkConfig& xt, const DeviceModel& device, double total_ns,
                                            std::uint64_t seed) {
    xt.validate();
    const double dt = device.dt_ns;
    const std::size_t n = static_cast<std::size_t>(std::ceil(total_ns / dt - 1e-9));
    std::vector<Complex> drive(n, Complex(0.0, 0.0));
    if (xt.relative_coupling == 0.0 || n == 0) {
        return drive;
    }
    const CliffordGroup& group = CliffordGroup::get(1);
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(group.size() - 1));
    // The aggressor pulses use the plain cosine envelope (no quadrature term).
    XYPulseParams pulse{xt.amplitude_ghz(), 0.0, 0.0, xt.gate_length_ns};
    const TransmonParams& victim = device.qubits[0];
    const double victim_frame = device.xy[0].drive_frequency_ghz;
    const double offset = victim.f10_ghz + xt.detuning_ghz - victim_frame;
    // The aggressor line is not synchronized with the victim: its pulse grid
    // starts at a random offset and its carrier has a random phase, both
    // drawn per sequence.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double t0 = -xt.gate_length_ns * unit(rng);
    const Complex carrier = std::polar(1.0, kTwoPi * unit(rng));
    while (t0 < total_ns) {
        for (const PhysicalOp& op : group[pick(rng)].decomposition) {
            const RotationSpec spec = rotation_spec(op.gate);
            const long first = std::max(0L, std::lround(t0 / dt));
            const long last = std::lround((t0 + xt.gate_length_ns) / dt);
            for (long jj = first; jj < last && jj < static_cast<long>(n); ++jj) {
                const auto j = static_cast<std::size_t>(jj);
                const double t = (static_cast<double>(j) + 0.5) * dt;
                const Complex env = xy_envelope(t - t0, spec.quarter_turns, spec.axis_phase, pulse, victim);
                drive[j] = xt.relative_coupling * carrier * env * std::polar(1.0, -kTwoPi * offset * t);
            }
            t0 += xt.gate_length_ns;
        }
    }
    return drive;
}

/// Evolves a single-qudit density matrix through the timeline on the device
/// grid. Victim pulses use the fourth-order Magnus step of the compiled
/// gates; the Z waveform and the crosstalk drive are sampled fields, constant
/// over each grid step. Pulses follow
/// the device's calibrated XY parameters on the victim frame; each physical
/// gate is followed by the depolarizing floor; each STEP ends with the
/// virtual-Z compensation of its nominal phase plus the device's correction.
inline Mat3 simulate_timeline(const Timeline& tl, const DeviceModel& device, const Mat3& rho0) {
    const double dt = device.dt_ns;
    const TransmonParams& q = device.qubits[0];
    const XYPulseParams& pulse = device.xy[0];
    const std::size_t n = timeline_samples(tl, dt);
    if (!tl.z_detuning.empty() && tl.z_detuning.size() < n) {
        throw std::invalid_argument("timeline Z waveform shorter than the schedule");
    }
    if (!tl.extra_drive.empty() && tl.extra_drive.size() < n) {
        throw std::invalid_argument("timeline crosstalk drive shorter than the schedule");
    }
    Mat3 rho = rho0;
    std::size_t j = 0;
    auto advance = [&](std::size_t until, const TimelineEvent* ev) {
        Mat3 u = Mat3::Identity();
        const RotationSpec spec = ev != nullptr && ev->kind == TimelineEvent::Kind::kGate ? rotation_spec(ev->gate)
                                                                                         : RotationSpec{0, 0.0};
        for (; j < until && j < n; ++j) {
            const double z = tl.z_detuning.empty() ? 0.0 : tl.z_detuning[j];
            const Complex extra = tl.extra_drive.empty() ? Complex(0.0, 0.0) : tl.extra_drive[j];
            if (spec.quarter_turns != 0) {
                // The victim pulse is smooth: same fourth-order step as the
                // compiled gates. Sampled fields are constant over the step.
                const double t0 = static_cast<double>(j) * dt - ev->start_ns;
                auto ham = [&](double t) {
                    const Complex victim = xy_envelope(t, spec.quarter_turns, spec.axis_phase, pulse, q);
                    return transmon_hamiltonian(q, pulse.drive_frequency_ghz, z, victim + extra);
                };
                u = magnus4_step<3>(ham(t0 + kMagnusNode1 * dt), ham(t0 + kMagnusNode2 * dt), dt) * u;
                continue;
            }
            const Mat3 h = transmon_hamiltonian(q, pulse.drive_frequency_ghz, z, extra);
            if (extra == Complex(0.0, 0.0)) {
                Eigen::Vector3d e(h(0, 0).real(), h(1, 1).real(), h(2, 2).real());
                u = expm_diagonal<3>(e, dt) * u;
            } else {
                u = expm_hermitian<3>(h, dt) * u;
            }
        }
        rho = u * rho * u.adjoint();
    };
    for (const TimelineEvent& ev : tl.events) {
        const auto begin = static_cast<std::size_t>(std::lround(ev.start_ns / dt));
        const auto end = static_cast<std::size_t>(std::lround((ev.start_ns + ev.duration_ns) / dt));
        if (begin > j) {
            advance(begin, nullptr);
        }
        advance(end, &ev);
        if (ev.kind == TimelineEvent::Kind::kGate) {
            depolarize_qudit<3>(rho, 0, device.noise.sq_depolarizing);
        } else {
            const Mat3 z = virtual_z(device.step.ideal_phase() + device.step_phase_correction);
            rho = z * rho * z.adjoint();
        }
    }
    if (j < n) {
        advance(n, nullptr);
    }
    return rho;
}

namespace detail {

/// Idle-frame propagator of a pure Z detuning f (GHz) over dt: level n
/// picks up exp(-i n 2 pi f dt).
inline Vec3 z_phases(double f_ghz, double dt) {
    const double a = -kTwoPi * f_ghz * dt;
    return Vec3(Complex(1.0, 0.0), std::polar(1.0, a), std::polar(1.0, 2.0 * a));
}

/// Phase of |1> relative to |0> read out by X and Y tomography.
inline double tomography_phase(const Vec3& psi) {
    const Complex rho10 = psi(1) * std::conj(psi(0));
    const double x = 2.0 * rho10.real();
    const double y = 2.0 * rho10.imag();
    return std::atan2(y, x);
}

}  // namespace detail

/// Applies a step (through the forward line and an optional correction
/// filter) to a single-qudit state in its idle frame, then idles through the
/// observation window. No virtual-Z compensation is applied, so the state
/// carries the full accumulated phase.
inline Vec3 apply_step_detune(const Vec3& state, const StepPulseParams& step, const LineResponse& forward,
                              const LineResponse* correction, const TransmonParams& qubit,
                              double dt = kDefaultDt) {
    require_normalized(state.norm(), "apply_step_detune");
    qubit.validate();
    const Waveform z = line_output(step.ideal_waveform(dt), forward, correction);
    Vec3 psi = state;
    for (double f : z.samples) {
        psi = detail::z_phases(f, dt).asDiagonal() * psi;
    }
    return psi;
}

/// Post-step probe times: from the end of the step through the window.
inline std::vector<double> post_step_times(const StepPulseParams& step, int count) {
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        t[static_cast<std::size_t>(i)] = step.duration_ns + step.window_ns * i / std::max(1, count - 1);
    }
    return t;
}

/// Tomographic phase-deviation trace of a step: the qudit starts in
/// (|0> + |1>)/sqrt2, the distorted (and optionally corrected) step plays,
/// and at each time t (ns after the step starts) the phase read from <X> and
/// <Y> is compared with the ideal rectangular step. Deviations are unwrapped
/// along the given order of times and shifted by a multiple of 2 pi so the
/// final one lies in (-pi, pi].
inline std::vector<double> probe_phase_trace(const StepPulseParams& step, std::span<const double> times,
                                             const DeviceModel& device) {
    step.validate();
    const double dt = device.dt_ns;
    const double horizon = step.duration_ns + step.window_ns;
    for (double t : times) {
        if (t < 0.0 || t > horizon + 1e-9) {
            throw std::invalid_argument("probe time " + std::to_string(t) + " ns outside the observation window");
        }
    }
    const Waveform ideal = step.ideal_waveform(dt);
    const Waveform actual = line_output(ideal, device.line, device.correction ? &*device.correction : nullptr);
    // Phase deviation after each number of samples.
    std::vector<double> deviation(ideal.samples.size() + 1, 0.0);
    const Vec3 plus(Complex(1.0 / std::sqrt(2.0), 0.0), Complex(1.0 / std::sqrt(2.0), 0.0), Complex(0.0, 0.0));
    Vec3 psi_actual = plus;
    Vec3 psi_ideal = plus;
    for (std::size_t n = 0; n < ideal.samples.size(); ++n) {
        psi_actual = detail::z_phases(actual.samples[n], dt).asDiagonal() * psi_actual;
        psi_ideal = detail::z_phases(ideal.samples[n], dt).asDiagonal() * psi_ideal;
        deviation[n + 1] =
            wrap_phase(detail::tomography_phase(psi_actual) - detail::tomography_phase(psi_ideal));
    }
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto k = std::min(deviation.size() - 1, static_cast<std::size_t>(std::lround(t / dt)));
        const double d = deviation[k];
        out.push_back(out.empty() ? d : out.back() + wrap_phase(d - out.back()));
    }
    if (!out.empty()) {
        const double shift = out.back() - wrap_phase(out.back());
        for (double& v : out) {
            v -= shift;
        }
    }
    return out;
}

}  // namespace orbitlab
