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

#include "orbitlab/backends.hpp"
#include "orbitlab/clifford.hpp"
#include "orbitlab/cz.hpp"
#include "orbitlab/device.hpp"
#include "orbitlab/nelder_mead.hpp"
#include "orbitlab/rb.hpp"
#include "orbitlab/seed.hpp"
#include "orbitlab/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

/// Settings of one closed-loop run: the ORBIT length and budget per cost
/// evaluation plus the verification RB that brackets the run.
struct OrbitSettings {
    int m = 100;
    int k = 20;
    int repetitions = 900;  // 0 = exact expectation
    int max_evaluations = 200;
    double noise_floor_factor = 2.0;  // stop when the simplex cost spread is below this many shot-noise sigmas
    int parallel = 1;
    /// Draw new random sequences for every cost evaluation (default); when
    /// false every evaluation reuses one sequence set.
    bool fresh_sequences = true;
    std::vector<int> verify_m;
    int verify_k = 40;
};

/// Verification of a gate: reference and interleaved fits plus the
/// extracted interleaved-gate error.
struct GateVerification {
    RbCurve reference_curve;
    RbCurve interleaved_curve;
    DecayFit reference;
    DecayFit interleaved;
    GateError gate;
};

template <RbBackend Backend>
GateVerification verify_gate(const Backend& backend, const std::string& gate_label, const std::vector<int>& m_values,
                             int k, int repetitions, int parallel, std::uint64_t seed) {
    GateVerification v;
    RbRunOptions o;
    o.k = k;
    o.repetitions = repetitions;
    o.parallel = parallel;
    v.reference_curve = run_rb_curve(backend, m_values, o, derive_seed(seed, {0}));
    o.interleaved = interleaved_from_label(gate_label, backend.qubit_count());
    v.interleaved_curve = run_rb_curve(backend, m_values, o, derive_seed(seed, {1}));
    v.reference = fit_decay(v.reference_curve);
    v.interleaved = fit_decay(v.interleaved_curve);
    v.gate = gate_error(v.interleaved.p, v.reference.p, backend.qubit_count());
    return v;
}

/// Binomial standard deviation of a k-sequence mean at fidelity f.
inline double shot_noise_sigma(double f, int k, int repetitions) {
    if (repetitions <= 0) {
        return 0.0;
    }
    const double v = std::clamp(f, 0.0, 1.0) * (1.0 - std::clamp(f, 0.0, 1.0));
    return std::sqrt(v / (static_cast<double>(k) * repetitions));
}

namespace detail {

/// Runs Nelder-Mead on an ORBIT cost with a fresh sequence seed per
/// evaluation. Termination uses only the cost spread (2 sigma of shot noise
/// by default) or the evaluation budget.
template <class MakeBackend>
OptimizationTrace orbit_optimize(const MakeBackend& make_backend, const std::vector<double>& x0,
                                 const std::vector<double>& initial_step, const OrbitSettings& s,
                                 const std::optional<InterleavedGate>& interleaved, std::uint64_t seed) {
    RbRunOptions o;
    o.k = s.k;
    o.repetitions = s.repetitions;
    o.parallel = s.parallel;
    o.interleaved = interleaved;
    std::uint64_t evaluation = 0;
    double floor_estimate = -1.0;
    auto cost = [&](std::span<const double> x) -> double {
        const std::uint64_t eval_seed =
            derive_seed(seed, {tag(Stream::optimizer), s.fresh_sequences ? evaluation : 0});
        ++evaluation;
        try {
            const auto backend = make_backend(x);
            const OrbitCost c = orbit_metric(backend, s.m, o, eval_seed);
            if (floor_estimate < 0.0) {
                floor_estimate = shot_noise_sigma(c.mean, s.k, s.repetitions);
            }
            return c.cost;
        } catch (const std::invalid_argument&) {
            // Unphysical parameters (e.g. a negative hold time) rank worst.
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    // Probe the start once so the tolerance is known before the simplex runs.
    NelderMeadConfig cfg;
    cfg.initial_step = initial_step;
    cfg.max_evaluations = s.max_evaluations;
    cfg.x_tolerance = std::numeric_limits<double>::infinity();
    {
        const auto backend = make_backend(x0);
        RbRunOptions probe = o;
        const OrbitCost c = orbit_metric(backend, s.m, probe, derive_seed(seed, {tag(Stream::optimizer), ~0ULL}));
        floor_estimate = shot_noise_sigma(c.mean, s.k, s.repetitions);
    }
    cfg.f_tolerance = s.noise_floor_factor * floor_estimate;
    return nelder_mead(cost, x0, cfg);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// X/2 tuning: amplitude, drive frequency and DRAG coefficient of qubit 0.

struct X2Perturbation {
    double amplitude_relative = 0.05;
    double detuning_ghz = 0.002;
    double drag_offset = 0.3;
};

inline XYPulseParams perturb_xy(const XYPulseParams& p, const X2Perturbation& d) {
    XYPulseParams out = p;
    out.amplitude_ghz *= 1.0 + d.amplitude_relative;
    out.drive_frequency_ghz += d.detuning_ghz;
    out.drag += d.drag_offset;
    return out;
}

struct X2Result {
    XYPulseParams start;
    XYPulseParams tuned;
    OptimizationTrace trace;
    GateVerification before;
    GateVerification after;
};

inline DeviceModel with_xy(DeviceModel d, std::span<const double> x) {
    d.xy[0].amplitude_ghz = x[0];
    d.xy[0].drive_frequency_ghz = x[1];
    d.xy[0].drag = x[2];
    return d;
}

inline X2Result optimize_x2(const DeviceModel& device, const OrbitSettings& s, std::uint64_t seed,
                            bool verify = true) {
    X2Result r;
    r.start = device.xy[0];
    const std::vector<double> x0 = {r.start.amplitude_ghz, r.start.drive_frequency_ghz, r.start.drag};
    // Initial simplex: 2% of amplitude, 1 MHz, 0.1 of DRAG.
    const std::vector<double> step = {0.02 * r.start.amplitude_ghz, 0.001, 0.1};
    auto make = [&](std::span<const double> x) { return GateSetBackend(with_xy(device, x), 1); };
    {
        const auto b = make(x0);
        RbRunOptions o;
        o.k = s.k;
        o.repetitions = s.repetitions;
        o.parallel = s.parallel;
        const OrbitCost c = orbit_metric(b, s.m, o, derive_seed(seed, {tag(Stream::optimizer), ~1ULL}));
        // Fully depolarized qubit read through the SPAM model.
        const double floor = 0.5 * (1.0 - device.spam.readout_error_0 + device.spam.readout_error_1);
        if (c.mean <= floor + std::max(3.0 * shot_noise_sigma(c.mean, s.k, s.repetitions), 0.02)) {
            throw std::runtime_error("initial sequence fidelity at m = " + std::to_string(s.m) +
                                     " is at the decay floor; use a smaller m");
        }
    }
    r.trace = detail::orbit_optimize(make, x0, step, s, std::nullopt, seed);
    r.tuned = with_xy(device, r.trace.best_params).xy[0];
    if (verify) {
        const auto vseed = derive_seed(seed, {tag(Stream::verification)});
        r.before = verify_gate(make(x0), "X/2", s.verify_m, s.verify_k, s.repetitions, s.parallel, vseed);
        r.after = verify_gate(make(r.trace.best_params), "X/2", s.verify_m, s.verify_k, s.repetitions, s.parallel,
                              vseed);
    }
    return r;
}

/// Fidelity landscape of one X/2 parameter around the device's values.
struct LandscapePoint {
    std::string parameter;
    double value;
    int m;
    double fidelity;
};

inline std::vector<LandscapePoint> landscape_x2(const DeviceModel& device, const std::vector<int>& m_values,
                                                int points, int k, int repetitions, int parallel,
                                                std::uint64_t seed) {
    if (points < 2) {
        throw std::invalid_argument("landscape needs at least 2 points per parameter");
    }
    const XYPulseParams c = device.xy[0];
    const std::vector<double> center = {c.amplitude_ghz, c.drive_frequency_ghz, c.drag};
    const std::vector<double> half_range = {0.1 * c.amplitude_ghz, 0.004, 1.0};
    const char* names[] = {"amplitude_ghz", "drive_frequency_ghz", "drag"};
    std::vector<LandscapePoint> out;
    RbRunOptions o;
    o.k = k;
    o.repetitions = repetitions;
    o.parallel = parallel;
    for (std::size_t p = 0; p < 3; ++p) {
        for (int i = 0; i < points; ++i) {
            std::vector<double> x = center;
            x[p] = center[p] + half_range[p] * (2.0 * i / (points - 1) - 1.0);
            const GateSetBackend b(with_xy(device, x), 1);
            for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
                const OrbitCost cost =
                    orbit_metric(b, m_values[mi], o, derive_seed(seed, {p, static_cast<std::uint64_t>(i), mi}));
                out.push_back({names[p], x[p], m_values[mi], cost.mean});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CZ tuning: all eight trajectory parameters.

inline DeviceModel with_cz(DeviceModel d, std::span<const double> x) {
    std::copy(x.begin(), x.end(), d.cz.params.begin());
    return d;
}

/// Coherent infidelity of the device CZ on the computational subspace.
inline double cz_coherent_error(const DeviceModel& d) {
    return 1.0 - analyze_cz(cz_unitary(d.cz, d.qubits[0], d.qubits[1], d.dt_ns)).fidelity;
}

/// Typical size of each CZ parameter, used both as the perturbation unit and
/// as the initial simplex step.
inline std::vector<double> cz_parameter_scale() {
    return {0.004, 1.0, 1.0, 0.05, 0.02, 0.02, 0.05, 0.05};
}

/// Seeded random perturbation of the CZ trajectory: a random direction in
/// units of cz_parameter_scale(), stretched until the predicted two-qubit
/// reference error reaches `target_reference_error`. The prediction uses
/// the coherent CZ error plus the device's depolarizing floors.
inline DeviceModel perturb_cz(const DeviceModel& device, double target_reference_error, std::uint64_t seed) {
    Rng rng = make_rng(derive_seed(seed, {tag(Stream::perturbation)}));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto scale = cz_parameter_scale();
    std::vector<double> dir(8);
    for (std::size_t i = 0; i < 8; ++i) {
        dir[i] = u(rng) * scale[i];
    }
    const double r_sq = 0.5 * device.noise.sq_depolarizing;
    const double r_cz_floor = 0.75 * device.noise.cz_depolarizing;
    auto predicted = [&](double t) {
        std::vector<double> x(device.cz.params.begin(), device.cz.params.end());
        for (std::size_t i = 0; i < 8; ++i) {
            x[i] += t * dir[i];
        }
        const DeviceModel d = with_cz(device, x);
        return expected_reference_error(1.2 * r_sq, r_cz_floor + cz_coherent_error(d));
    };
    double lo = 0.0;
    double hi = 1.0;
    while (predicted(hi) < target_reference_error) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1024.0) {
            throw std::runtime_error("perturb_cz: cannot reach the requested reference error");
        }
    }
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (predicted(mid) < target_reference_error ? lo : hi) = mid;
    }
    std::vector<double> x(device.cz.params.begin(), device.cz.params.end());
    for (std::size_t i = 0; i < 8; ++i) {
        x[i] += hi * dir[i];
    }
    return with_cz(device, x);
}

struct CzResult {
    std::vector<double> start;
    std::vector<double> tuned;
    OptimizationTrace trace;
    GateVerification before;
    GateVerification after;
    double r_single_before = 0.0;  // per physical single-qubit gate
    double r_single_after = 0.0;
    double expected_before = 0.0;
    double expected_after = 0.0;
};

/// Error per physical single-qubit gate, from single-qudit RB of both qudits.
inline double single_qubit_gate_error(const DeviceModel& device, const std::vector<int>& m_values, int k,
                                      int repetitions, int parallel, std::uint64_t seed) {
    RbRunOptions o;
    o.k = k;
    o.repetitions = repetitions;
    o.parallel = parallel;
    double total = 0.0;
    for (int q = 0; q < 2; ++q) {
        DeviceModel d = device;
        d.qubits[0] = device.qubits[static_cast<std::size_t>(q)];
        d.xy[0] = device.xy[static_cast<std::size_t>(q)];
        const DecayFit f = fit_decay(
            run_rb_curve(GateSetBackend(d, 1), m_values, o, derive_seed(seed, {static_cast<std::uint64_t>(q)})));
        total += f.r / CliffordGroup::get(1).average_single_qubit_gate_count();
    }
    return 0.5 * total;
}

inline CzResult optimize_cz(const DeviceModel& device, const OrbitSettings& s, std::uint64_t seed,
                            const std::vector<int>& single_qubit_m, bool verify = true) {
    CzResult r;
    r.start.assign(device.cz.params.begin(), device.cz.params.end());
    auto make = [&](std::span<const double> x) { return GateSetBackend(with_cz(device, x), 2); };
    r.trace = detail::orbit_optimize(make, r.start, cz_parameter_scale(), s, std::nullopt, seed);
    r.tuned = r.trace.best_params;
    if (verify) {
        const auto vseed = derive_seed(seed, {tag(Stream::verification)});
        r.before = verify_gate(make(r.start), "CZ", s.verify_m, s.verify_k, s.repetitions, s.parallel, vseed);
        r.after = verify_gate(make(r.tuned), "CZ", s.verify_m, s.verify_k, s.repetitions, s.parallel, vseed);
        // Single-qubit gates do not depend on the CZ trajectory.
        r.r_single_before = single_qubit_gate_error(device, single_qubit_m, s.verify_k, s.repetitions, s.parallel,
                                                    derive_seed(vseed, {2}));
        r.r_single_after = r.r_single_before;
        r.expected_before = expected_reference_error(r.r_single_before, std::max(0.0, r.before.gate.r));
        r.expected_after = expected_reference_error(r.r_single_after, std::max(0.0, r.after.gate.r));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Bleedthrough: two-pole predistortion plus the step's phase correction.

/// Parameter vector (a1, ln gamma1, a2, ln gamma2, phase) <-> device.
inline DeviceModel with_correction(DeviceModel d, std::span<const double> x) {
    LineResponse c;
    c.role = LineResponse::Role::kCorrection;
    c.poles = {{x[0], std::exp(x[1])}, {x[2], std::exp(x[3])}};
    d.correction = c;
    d.step_phase_correction = x[4];
    return d;
}

struct DeconvolutionResult {
    std::vector<double> start;
    std::vector<double> tuned;  // (a1, gamma1, a2, gamma2, phase) in natural units
    OptimizationTrace trace;
    GateVerification before;
    GateVerification after;
    std::vector<double> probe_times;
    std::vector<double> phase_before;
    std::vector<double> phase_after;
};

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline DeconvolutionResult optimize_deconvolution(const DeviceModel& device, const OrbitSettings& s,
                                                  std::uint64_t seed, bool verify = true) {
    DeconvolutionResult r;
    // Start from a weak guess; the rates live on a log scale.
    r.start = {0.0, std::log(0.1), 0.0, std::log(0.01), 0.0};
    const std::vector<double> step = {0.01, 0.5, 0.005, 0.5, 0.1};
    auto make = [&](std::span<const double> x) { return TimelineBackend(with_correction(device, x)); };
    r.trace = detail::orbit_optimize(make, r.start, step, s, interleaved_from_label("STEP", 1), seed);
    const auto& b = r.trace.best_params;
    r.tuned = {b[0], std::exp(b[1]), b[2], std::exp(b[3]), b[4]};
    // Report the poles ordered by rate (fast pole first).
    if (r.tuned[1] < r.tuned[3]) {
        std::swap(r.tuned[0], r.tuned[2]);
        std::swap(r.tuned[1], r.tuned[3]);
    }
    if (verify) {
        const auto vseed = derive_seed(seed, {tag(Stream::verification)});
        DeviceModel before = device;
        before.correction.reset();
        r.before = verify_gate(TimelineBackend(before), "STEP", s.verify_m, s.verify_k, s.repetitions, s.parallel,
                               vseed);
        const DeviceModel after = with_correction(device, r.trace.best_params);
        r.after = verify_gate(TimelineBackend(after), "STEP", s.verify_m, s.verify_k, s.repetitions, s.parallel,
                              vseed);
        r.probe_times = post_step_times(device.step, 101);
        r.phase_before = probe_phase_trace(device.step, r.probe_times, before);
        r.phase_after = probe_phase_trace(device.step, r.probe_times, after);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Crosstalk map.

struct CrosstalkCell {
    double detuning_ghz;
    double gate_length_ns;
    double seq_fidelity;
    double seq_fidelity_sem;
    double inferred_error;
    double added_error;
    double added_error_sigma;
    bool clamped;
};

struct CrosstalkMap {
    RbCurve reference_curve;
    DecayFit reference;
    int m = 35;
    std::vector<CrosstalkCell> cells;  // detuning-major order
};

inline CrosstalkMap crosstalk_map(const DeviceModel& device, const std::vector<double>& detunings,
                                  const std::vector<double>& gate_lengths, int m, int k, int repetitions,
                                  const std::vector<int>& reference_m, int parallel, std::uint64_t seed) {
    if (detunings.empty() || gate_lengths.empty()) {
        throw std::invalid_argument("crosstalk_map: grid must not be empty");
    }
    CrosstalkMap map;
    map.m = m;
    RbRunOptions o;
    o.k = k;
    o.repetitions = repetitions;
    o.parallel = parallel;
    map.reference_curve = run_rb_curve(TimelineBackend(device), reference_m, o, derive_seed(seed, {0}));
    map.reference = fit_decay(map.reference_curve);
    for (std::size_t i = 0; i < detunings.size(); ++i) {
        for (std::size_t j = 0; j < gate_lengths.size(); ++j) {
            CrosstalkConfig xt = device.crosstalk;
            xt.detuning_ghz = detunings[i];
            xt.gate_length_ns = gate_lengths[j];
            const TimelineBackend b(device, xt);
            // The same sequences in every cell, so cells differ only by the crosstalk.
            const OrbitCost c = orbit_metric(b, m, o, derive_seed(seed, {1}));
            const InferredError e = infer_error_at_m(c.mean, map.reference, m);
            CrosstalkCell cell{};
            cell.detuning_ghz = xt.detuning_ghz;
            cell.gate_length_ns = xt.gate_length_ns;
            cell.seq_fidelity = c.mean;
            cell.seq_fidelity_sem = c.standard_error;
            cell.inferred_error = e.r;
            cell.added_error = e.r - map.reference.r;
            cell.added_error_sigma = inferred_error_sigma(c.standard_error, map.reference, m, e);
            cell.clamped = e.clamped;
            map.cells.push_back(cell);
        }
    }
    return map;
}

// ---------------------------------------------------------------------------
// Sensitivity curves.

struct SensitivityPoint {
    double r;
    int m;
    double dF_dr;
};

inline std::vector<SensitivityPoint> sensitivity_curves(const std::vector<double>& errors, double A, int m_max,
                                                        int m_step) {
    std::vector<SensitivityPoint> out;
    for (double r : errors) {
        for (int m = 0; m <= m_max; m += m_step) {
            out.push_back({r, m, sensitivity(r, A, m).dF_dr_at_m});
        }
    }
    return out;
}

}  // namespace orbitlab
