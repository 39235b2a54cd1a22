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
#include "orbitlab/device.hpp"
#include "orbitlab/linalg.hpp"
#include "orbitlab/measurement.hpp"
#include "orbitlab/pulse.hpp"
#include "orbitlab/seed.hpp"
#include "orbitlab/timeline.hpp"

#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

/// A backend turns one RB sequence into the exact probability of reading
/// every qubit as ground (SPAM included). `seed` feeds any randomness the
/// backend needs beyond the sequence itself (e.g. a crosstalk pulse train).
template <class B>
concept RbBackend = requires(const B& b, const RbSequence& s, std::uint64_t seed) {
    { b.qubit_count() } -> std::convertible_to<int>;
    { b.ground_probability(s, seed) } -> std::convertible_to<double>;
};

namespace detail {

/// Readout of ideal qubits: P(read 0 | 0) = 1 - e0, P(read 0 | 1) = e1.
inline double qubit_readout_ground(const MatX& rho, int qubits, const SpamParams& spam) {
    double total = 0.0;
    for (int i = 0; i < rho.rows(); ++i) {
        double w = 1.0;
        for (int q = 0; q < qubits; ++q) {
            const bool excited = ((i >> (qubits - 1 - q)) & 1) != 0;
            w *= excited ? spam.readout_error_1 : 1.0 - spam.readout_error_0;
        }
        total += w * rho(i, i).real();
    }
    return total;
}

inline MatX qubit_prepared_state(int qubits, const SpamParams& spam) {
    Mat2 one = Mat2::Zero();
    one(0, 0) = 1.0 - spam.prep_error;
    one(1, 1) = spam.prep_error;
    MatX rho = one;
    for (int q = 1; q < qubits; ++q) {
        rho = Eigen::kroneckerProduct(rho, one).eval();
    }
    return rho;
}

template <int D>
double depolarizing_sequence(const RbSequence& s, double p_clifford, double p_interleaved, const SpamParams& spam,
                             int qubits) {
    const auto& g = s.group();
    Mat<D> rho = qubit_prepared_state(qubits, spam);
    const Mat<D> mixed = Mat<D>::Identity() / static_cast<double>(D);
    auto channel = [&](double p) { rho = p * rho + (1.0 - p) * rho.trace().real() * mixed; };
    auto apply = [&](const Mat<D>& u) { rho = u * rho * u.adjoint(); };
    Mat<D> inter = Mat<D>::Identity();
    if (s.interleaved) {
        inter = s.interleaved->ideal;
    }
    for (std::uint32_t c : s.elements) {
        apply(Mat<D>(g[c].unitary));
        channel(p_clifford);
        if (s.interleaved) {
            apply(inter);
            channel(p_interleaved);
        }
    }
    apply(Mat<D>(g[s.recovery].unitary));
    channel(p_clifford);
    return qubit_readout_ground(rho, qubits, spam);
}

}  // namespace detail

/// Ideal Clifford unitaries on qubits with an injected depolarizing channel
/// rho -> p rho + (1 - p) I/d after every Clifford (and after the
/// interleaved gate with its own p). Used as a known-answer oracle.
struct DepolarizingBackend {
    int qubits = 1;
    double p_clifford = 1.0;
    double p_interleaved = 1.0;
    SpamParams spam = SpamParams::none();

    int qubit_count() const { return qubits; }

    double ground_probability(const RbSequence& s, std::uint64_t /*seed*/) const {
        if (s.qubit_count != qubits) {
            throw std::invalid_argument("sequence qubit count does not match the depolarizing backend");
        }
        for (double p : {p_clifford, p_interleaved}) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("depolarizing parameter must lie in [0, 1]");
            }
        }
        return qubits == 1 ? detail::depolarizing_sequence<2>(s, p_clifford, p_interleaved, spam, 1)
                           : detail::depolarizing_sequence<4>(s, p_clifford, p_interleaved, spam, 2);
    }
};

/// Pulse-level backend that treats each physical gate as its precompiled
/// propagator on three-level qudits (no time dependence between gates),
/// followed by the device's depolarizing floor.
class GateSetBackend {
public:
    GateSetBackend(const DeviceModel& device, int qubits) : qubits_(qubits), device_(device) {
        if (qubits != 1 && qubits != 2) {
            throw std::invalid_argument("gate-set backend supports 1 or 2 qudits, got " + std::to_string(qubits));
        }
        device.validate();
        for (int q = 0; q < qubits; ++q) {
            sets_[q] = compile_gate_set(device.xy[q], device.qubits[q], device.dt_ns);
        }
        if (qubits == 2) {
            const Mat3 id = Mat3::Identity();
            for (GateKind g : kSingleQubitGates) {
                const auto i = static_cast<std::size_t>(g);
                lifted_[0][i] = Eigen::kroneckerProduct(sets_[0][g], id);
                lifted_[1][i] = Eigen::kroneckerProduct(id, sets_[1][g]);
            }
            // The CZ is simulated in each qudit's f10 frame; re-express it in
            // the drive frames the single-qubit gates use.
            const double t = device.cz.total_time_ns;
            const double d0 = kTwoPi * (device.qubits[0].f10_ghz - device.xy[0].drive_frequency_ghz) * t;
            const double d1 = kTwoPi * (device.qubits[1].f10_ghz - device.xy[1].drive_frequency_ghz) * t;
            cz_ = two_qudit_frame(d0, d1) * cz_unitary(device.cz, device.qubits[0], device.qubits[1], device.dt_ns);
        }
    }

    int qubit_count() const { return qubits_; }
    const Mat9& cz() const { return cz_; }
    const QuditGateSet& gate_set(int q) const { return sets_.at(static_cast<std::size_t>(q)); }

    double ground_probability(const RbSequence& s, std::uint64_t /*seed*/) const {
        if (s.qubit_count != qubits_) {
            throw std::invalid_argument("sequence qubit count does not match the gate-set backend");
        }
        return qubits_ == 1 ? run<3>(s) : run<9>(s);
    }

private:
    template <int D>
    void apply_op(Mat<D>& rho, const PhysicalOp& op) const {
        if constexpr (D == 3) {
            const Mat3& u = sets_[0][op.gate];
            rho = u * rho * u.adjoint();
            depolarize_qudit<3>(rho, 0, device_.noise.sq_depolarizing);
        } else {
            if (op.gate == GateKind::CZ) {
                rho = cz_ * rho * cz_.adjoint();
                depolarize_pair(rho, device_.noise.cz_depolarizing);
            } else {
                const Mat9& u = lifted_[op.qubit][static_cast<std::size_t>(op.gate)];
                rho = u * rho * u.adjoint();
                depolarize_qudit<9>(rho, op.qubit, device_.noise.sq_depolarizing);
            }
        }
    }

    template <int D>
    double run(const RbSequence& s) const {
        const auto& g = s.group();
        Mat<D> rho = prepared_state<D>(device_.spam);
        std::optional<PhysicalOp> inter;
        if (s.interleaved && s.interleaved->label != "IDLE") {
            const auto k = parse_gate_label(s.interleaved->label);
            if (!k) {
                throw std::invalid_argument("gate-set backend cannot interleave '" + s.interleaved->label + "'");
            }
            inter = PhysicalOp{*k, 0};
        }
        auto clifford = [&](std::uint32_t c) {
            for (const PhysicalOp& op : g[c].decomposition) {
                apply_op<D>(rho, op);
            }
        };
        for (std::uint32_t c : s.elements) {
            clifford(c);
            if (inter) {
                apply_op<D>(rho, *inter);
            }
        }
        clifford(s.recovery);
        Eigen::Matrix<double, D, 1> pops = rho.diagonal().real();
        return readout_ground_probability(std::span<const double>(pops.data(), D), D == 3 ? 1 : 2, device_.spam);
    }

    int qubits_;
    DeviceModel device_;
    std::array<QuditGateSet, 2> sets_{};
    std::array<std::array<Mat9, 7>, 2> lifted_{};
    Mat9 cz_ = Mat9::Identity();
};

/// Time-domain single-qudit backend: gates are played back to back on a
/// common clock, so Z-line tails from interleaved steps and a simultaneous
/// crosstalk pulse train act on whatever is running at the time.
class TimelineBackend {
public:
    explicit TimelineBackend(const DeviceModel& device, std::optional<CrosstalkConfig> crosstalk = std::nullopt)
        : device_(device), crosstalk_(crosstalk) {
        device.validate();
        if (crosstalk_) {
            crosstalk_->validate();
        }
    }

    int qubit_count() const { return 1; }

    double ground_probability(const RbSequence& s, std::uint64_t seed) const {
        Timeline tl = schedule_sequence(s, device_);
        attach_step_waveform(tl, device_);
        if (crosstalk_ && crosstalk_->relative_coupling != 0.0) {
            tl.extra_drive =
                crosstalk_drive(*crosstalk_, device_, tl.total_ns, derive_seed(seed, {tag(Stream::aggressor)}));
        }
        const Mat3 rho = simulate_timeline(tl, device_, prepared_state<3>(device_.spam));
        Eigen::Vector3d pops = rho.diagonal().real();
        return readout_ground_probability(std::span<const double>(pops.data(), 3), 1, device_.spam);
    }

private:
    DeviceModel device_;
    std::optional<CrosstalkConfig> crosstalk_;
};

}  // namespace orbitlab
