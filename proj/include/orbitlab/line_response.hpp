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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

/// Uniformly sampled waveform; sample n holds the value on [n dt, (n+1) dt).
struct Waveform {
    double dt_ns = 0.05;
    std::vector<double> samples;

    double duration_ns() const { return dt_ns * static_cast<double>(samples.size()); }
};

struct Pole {
    double amplitude = 0.0;  // a_i, dimensionless
    double rate = 1.0;       // gamma_i, 1/ns
};

/// Sum-of-exponentials line response. In the "forward" role it describes
/// how the line distorts a waveform; in the "correction" role it is the
/// predistortion filter that undoes a forward response with the same poles.
struct LineResponse {
    enum class Role { kForward, kCorrection };

    std::vector<Pole> poles;
    Role role = Role::kForward;

    void validate() const {
        for (const Pole& p : poles) {
            if (!std::isfinite(p.amplitude) || !(p.rate > 0.0) || !std::isfinite(p.rate)) {
                throw std::invalid_argument("line response poles need finite amplitude and positive rate (got a=" +
                                            std::to_string(p.amplitude) + ", gamma=" + std::to_string(p.rate) +
                                            ")");
            }
        }
    }

    /// Step response at t >= 0: 1 + sum a_i exp(-gamma_i t).
    double step_response(double t_ns) const {
        double v = 1.0;
        for (const Pole& p : poles) {
            v += p.amplitude * std::exp(-p.rate * t_ns);
        }
        return v;
    }
};

namespace detail {

inline void require_waveform(const Waveform& w, const char* what) {
    if (w.samples.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty waveform");
    }
    if (!(w.dt_ns > 0.0)) {
        throw std::invalid_argument(std::string(what) + ": sample spacing must be positive");
    }
}

}  // namespace detail

/// Convolves the waveform's derivative with the step response, i.e. each
/// edge of height h at sample n contributes h (1 + sum a_i e^{-gamma_i (t - t_n)}).
/// A unit step therefore reproduces the step response exactly at the samples.
inline Waveform apply_forward_response(const Waveform& ideal, const std::vector<Pole>& poles) {
    detail::require_waveform(ideal, "distort");
    Waveform out{ideal.dt_ns, std::vector<double>(ideal.samples.size())};
    std::vector<double> state(poles.size(), 0.0);
    std::vector<double> decay(poles.size());
    for (std::size_t i = 0; i < poles.size(); ++i) {
        decay[i] = std::exp(-poles[i].rate * ideal.dt_ns);
    }
    double prev = 0.0;
    for (std::size_t n = 0; n < ideal.samples.size(); ++n) {
        const double x = ideal.samples[n];
        double y = x;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            state[i] = decay[i] * state[i] + poles[i].amplitude * (x - prev);
            y += state[i];
        }
        out.samples[n] = y;
        prev = x;
    }
    return out;
}

/// Exact inverse of apply_forward_response for the same poles: returns x
/// with apply_forward_response(x, poles) == target up to rounding.
inline Waveform apply_inverse_response(const Waveform& target, const std::vector<Pole>& poles) {
    detail::require_waveform(target, "predistort");
    double gain = 1.0;
    std::vector<double> decay(poles.size());
    for (std::size_t i = 0; i < poles.size(); ++i) {
        gain += poles[i].amplitude;
        decay[i] = std::exp(-poles[i].rate * target.dt_ns);
    }
    if (std::abs(gain) < 1e-12) {
        throw std::invalid_argument("inverse response undefined: 1 + sum a_i is zero");
    }
    Waveform out{target.dt_ns, std::vector<double>(target.samples.size())};
    std::vector<double> state(poles.size(), 0.0);
    double prev = 0.0;
    for (std::size_t n = 0; n < target.samples.size(); ++n) {
        double rhs = target.samples[n];
        for (std::size_t i = 0; i < poles.size(); ++i) {
            rhs -= decay[i] * state[i] - poles[i].amplitude * prev;
        }
        const double x = rhs / gain;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            state[i] = decay[i] * state[i] + poles[i].amplitude * (x - prev);
        }
        out.samples[n] = x;
        prev = x;
    }
    return out;
}

/// Applies a line response in its role: forward responses distort,
/// correction responses predistort.
inline Waveform distort_step(const Waveform& ideal, const LineResponse& response) {
    response.validate();
    return response.role == LineResponse::Role::kForward ? apply_forward_response(ideal, response.poles)
                                                          : apply_inverse_response(ideal, response.poles);
}

/// Waveform actually seen by the qubit: optional predistortion, then the line.
inline Waveform line_output(const Waveform& ideal, const LineResponse& forward, const LineResponse* correction) {
    forward.validate();
    if (correction == nullptr) {
        return apply_forward_response(ideal, forward.poles);
    }
    correction->validate();
    return apply_forward_response(apply_inverse_response(ideal, correction->poles), forward.poles);
}

/// Flat Z-line detuning pulse followed by an observation window.
struct StepPulseParams {
    double detuning_ghz = -0.37;
    double duration_ns = 35.0;
    double window_ns = 200.0;

    void validate() const {
        if (!(duration_ns > 0.0)) {
            throw std::invalid_argument("step duration must be positive");
        }
        if (window_ns < 0.0) {
            throw std::invalid_argument("step observation window must be non-negative");
        }
    }

    /// Ideal rectangular detuning waveform over the step plus the window.
    Waveform ideal_waveform(double dt_ns) const {
        validate();
        const std::size_t on = static_cast<std::size_t>(std::lround(duration_ns / dt_ns));
        const std::size_t total = on + static_cast<std::size_t>(std::lround(window_ns / dt_ns));
        Waveform w{dt_ns, std::vector<double>(std::max<std::size_t>(total, 1), 0.0)};
        for (std::size_t n = 0; n < on && n < w.samples.size(); ++n) {
            w.samples[n] = detuning_ghz;
        }
        return w;
    }

    /// Phase of |1> relative to |0> accumulated by the ideal step, rad
    /// (the sign follows the detuning).
    double ideal_phase() const { return kTwoPi * detuning_ghz * duration_ns; }
};

/// Accumulated phase 2 pi sum(df dt) of a detuning waveform over samples [begin, end).
inline double accumulated_phase(const Waveform& w, std::size_t begin, std::size_t end) {
    double sum = 0.0;
    for (std::size_t n = begin; n < end && n < w.samples.size(); ++n) {
        sum += w.samples[n];
    }
    return kTwoPi * sum * w.dt_ns;
}

}  // namespace orbitlab
