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
#include "orbitlab/seed.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace orbitlab {

/// Physical gates available to the Clifford decompositions.
enum class GateKind : std::uint8_t { I, X, Y, X90, Y90, MX90, MY90, CZ };

inline constexpr std::array<GateKind, 7> kSingleQubitGates = {
    GateKind::I, GateKind::X, GateKind::Y, GateKind::X90, GateKind::Y90, GateKind::MX90, GateKind::MY90};

constexpr std::string_view gate_label(GateKind g) {
    switch (g) {
        case GateKind::I: return "I";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::X90: return "X/2";
        case GateKind::Y90: return "Y/2";
        case GateKind::MX90: return "-X/2";
        case GateKind::MY90: return "-Y/2";
        case GateKind::CZ: return "CZ";
    }
    return "?";
}

inline std::optional<GateKind> parse_gate_label(std::string_view s) {
    for (GateKind g : {GateKind::I, GateKind::X, GateKind::Y, GateKind::X90, GateKind::Y90, GateKind::MX90,
                       GateKind::MY90, GateKind::CZ}) {
        if (gate_label(g) == s) {
            return g;
        }
    }
    return std::nullopt;
}

/// Rotation angle (in units of pi/2) and drive axis phase of a single-qubit
/// gate. Identity has zero angle.
struct RotationSpec {
    int quarter_turns;
    double axis_phase;
};

constexpr RotationSpec rotation_spec(GateKind g) {
    switch (g) {
        case GateKind::X: return {2, 0.0};
        case GateKind::Y: return {2, kPi / 2};
        case GateKind::X90: return {1, 0.0};
        case GateKind::Y90: return {1, kPi / 2};
        case GateKind::MX90: return {1, kPi};
        case GateKind::MY90: return {1, -kPi / 2};
        default: return {0, 0.0};
    }
}

inline Mat2 ideal_single_qubit_unitary(GateKind g) {
    if (g == GateKind::CZ) {
        throw std::invalid_argument("CZ is not a single-qubit gate");
    }
    const RotationSpec spec = rotation_spec(g);
    const double theta = spec.quarter_turns * kPi / 2;
    const Complex c = std::cos(theta / 2);
    const Complex s = std::sin(theta / 2);
    const Complex e = std::polar(1.0, spec.axis_phase);
    Mat2 u;
    u << c, -kI * s * std::conj(e), -kI * s * e, c;
    return u;
}

inline Mat4 ideal_cz_unitary() {
    Mat4 u = Mat4::Identity();
    u(3, 3) = -1.0;
    return u;
}

/// One physical operation. `qubit` is ignored for CZ.
struct PhysicalOp {
    GateKind gate;
    int qubit;

    friend bool operator==(const PhysicalOp&, const PhysicalOp&) = default;
};

/// Qubit 0 is the most significant tensor factor: basis index = 2*q0 + q1.
inline MatX ideal_op_unitary(const PhysicalOp& op, int qubit_count) {
    if (qubit_count == 1) {
        return ideal_single_qubit_unitary(op.gate);
    }
    if (op.gate == GateKind::CZ) {
        return ideal_cz_unitary();
    }
    const Mat2 u = ideal_single_qubit_unitary(op.gate);
    const Mat2 id = Mat2::Identity();
    return op.qubit == 0 ? MatX(Eigen::kroneckerProduct(u, id)) : MatX(Eigen::kroneckerProduct(id, u));
}

inline MatX ideal_decomposition_unitary(std::span<const PhysicalOp> ops, int qubit_count) {
    const int d = 1 << qubit_count;
    MatX u = MatX::Identity(d, d);
    for (const PhysicalOp& op : ops) {
        u = ideal_op_unitary(op, qubit_count) * u;
    }
    return u;
}

struct CliffordElement {
    int qubit_count = 1;
    std::uint32_t index = 0;
    MatX unitary;
    std::vector<PhysicalOp> decomposition;
    int cz_count = 0;

    std::string label() const {
        std::string digits = std::to_string(index);
        const std::size_t width = qubit_count == 1 ? 2 : 5;
        if (digits.size() < width) {
            digits.insert(0, width - digits.size(), '0');
        }
        return "C" + std::to_string(qubit_count) + "-" + digits;
    }

    std::string decomposition_string() const {
        if (decomposition.empty()) {
            return "-";
        }
        std::string out;
        for (const PhysicalOp& op : decomposition) {
            if (!out.empty()) {
                out += ' ';
            }
            if (op.gate == GateKind::CZ || qubit_count == 1) {
                out += gate_label(op.gate);
            } else {
                out += "q" + std::to_string(op.qubit) + ":" + std::string(gate_label(op.gate));
            }
        }
        return out;
    }
};

namespace detail {

// Published-style single-qubit table (time order), average 1.875 gates.
inline const std::vector<std::vector<GateKind>>& single_qubit_table() {
    using G = GateKind;
    static const std::vector<std::vector<GateKind>> table = {
        // Paulis
        {G::I}, {G::X}, {G::Y}, {G::Y, G::X},
        // 2pi/3 rotations
        {G::X90, G::Y90}, {G::X90, G::MY90}, {G::MX90, G::Y90}, {G::MX90, G::MY90},
        {G::Y90, G::X90}, {G::Y90, G::MX90}, {G::MY90, G::X90}, {G::MY90, G::MX90},
        // pi/2 rotations
        {G::X90}, {G::MX90}, {G::Y90}, {G::MY90}, {G::MX90, G::Y90, G::X90}, {G::MX90, G::MY90, G::X90},
        // Hadamard-like
        {G::X, G::Y90}, {G::X, G::MY90}, {G::Y, G::X90}, {G::Y, G::MX90}, {G::X90, G::Y90, G::X90},
        {G::MX90, G::Y90, G::MX90},
    };
    return table;
}

// Axis-permuting subgroup used as coset representatives after a CZ.
inline const std::vector<std::vector<GateKind>>& s1_table() {
    using G = GateKind;
    static const std::vector<std::vector<GateKind>> table = {{}, {G::Y90, G::X90}, {G::MX90, G::MY90}};
    return table;
}

struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const noexcept {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (std::int64_t v : k) {
            h = detail::splitmix64(h ^ static_cast<std::uint64_t>(v));
        }
        return static_cast<std::size_t>(h);
    }
};

inline std::vector<std::int64_t> unitary_key(const MatX& u) {
    const MatX n = phase_normalized(u);
    std::vector<std::int64_t> key;
    key.reserve(static_cast<std::size_t>(2 * n.size()));
    for (int r = 0; r < n.rows(); ++r) {
        for (int c = 0; c < n.cols(); ++c) {
            key.push_back(std::llround(n(r, c).real() * 1e6));
            key.push_back(std::llround(n(r, c).imag() * 1e6));
        }
    }
    return key;
}

}  // namespace detail

/// Enumerated Clifford group with lookup. Immutable once built; instances
/// returned by `get` are shared read-only.
class CliffordGroup {
   public:
    static const CliffordGroup& get(int qubit_count) {
        if (qubit_count == 1) {
            static const CliffordGroup one(1);
            return one;
        }
        if (qubit_count == 2) {
            static const CliffordGroup two(2);
            return two;
        }
        throw std::invalid_argument("Clifford groups are available for 1 or 2 qubits, got " +
                                    std::to_string(qubit_count));
    }

    int qubit_count() const { return qubit_count_; }
    std::size_t size() const { return elements_.size(); }
    std::span<const CliffordElement> elements() const { return elements_; }
    const CliffordElement& operator[](std::uint32_t i) const { return elements_.at(i); }
    std::uint32_t identity_index() const { return identity_; }

    std::optional<std::uint32_t> find(const MatX& u) const {
        if (u.rows() != (1 << qubit_count_) || u.cols() != u.rows()) {
            return std::nullopt;
        }
        auto it = index_.find(detail::unitary_key(u));
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Index of "a then b".
    std::uint32_t compose_index(std::uint32_t a, std::uint32_t b) const {
        if (!table_.empty()) {
            return table_[a * size() + b];
        }
        return lookup(elements_[b].unitary * elements_[a].unitary);
    }

    std::uint32_t inverse_index(std::uint32_t a) const { return inverses_.at(a); }

    double average_cz_count() const {
        double total = 0.0;
        for (const auto& e : elements_) {
            total += e.cz_count;
        }
        return total / static_cast<double>(elements_.size());
    }

    double average_single_qubit_gate_count() const {
        double total = 0.0;
        for (const auto& e : elements_) {
            total += static_cast<double>(e.decomposition.size()) - e.cz_count;
        }
        return total / static_cast<double>(elements_.size());
    }

   private:
    explicit CliffordGroup(int qubit_count) : qubit_count_(qubit_count) {
        if (qubit_count == 1) {
            build_single();
        } else {
            build_two();
        }
        identity_ = lookup(MatX::Identity(1 << qubit_count, 1 << qubit_count));
        inverses_.resize(elements_.size());
        for (std::uint32_t i = 0; i < elements_.size(); ++i) {
            inverses_[i] = lookup(elements_[i].unitary.adjoint());
        }
        if (qubit_count == 1) {
            table_.resize(size() * size());
            for (std::uint32_t a = 0; a < size(); ++a) {
                for (std::uint32_t b = 0; b < size(); ++b) {
                    table_[a * size() + b] = lookup(elements_[b].unitary * elements_[a].unitary);
                }
            }
        }
    }

    std::uint32_t lookup(const MatX& u) const {
        auto it = index_.find(detail::unitary_key(u));
        if (it == index_.end()) {
            throw std::logic_error("product left the Clifford group");
        }
        return it->second;
    }

    void add(std::vector<PhysicalOp> ops) {
        CliffordElement e;
        e.qubit_count = qubit_count_;
        e.index = static_cast<std::uint32_t>(elements_.size());
        e.unitary = phase_normalized(ideal_decomposition_unitary(ops, qubit_count_));
        e.cz_count = 0;
        for (const auto& op : ops) {
            e.cz_count += op.gate == GateKind::CZ ? 1 : 0;
        }
        e.decomposition = std::move(ops);
        auto [it, inserted] = index_.emplace(detail::unitary_key(e.unitary), e.index);
        if (!inserted) {
            throw std::logic_error("duplicate Clifford in enumeration: " + e.decomposition_string());
        }
        elements_.push_back(std::move(e));
    }

    void build_single() {
        for (const auto& row : detail::single_qubit_table()) {
            std::vector<PhysicalOp> ops;
            for (GateKind g : row) {
                ops.push_back({g, 0});
            }
            add(std::move(ops));
        }
    }

    // Four classes by CZ count: local (0), CNOT-like (1), iSWAP-like (2),
    // SWAP-like (3). Class sizes 576, 5184, 5184, 576.
    void build_two() {
        using G = GateKind;
        const auto& c1 = detail::single_qubit_table();
        const auto& s1 = detail::s1_table();
        auto local = [](std::vector<PhysicalOp>& ops, const std::vector<GateKind>& gates, int q) {
            for (GateKind g : gates) {
                ops.push_back({g, q});
            }
        };
        const PhysicalOp cz{G::CZ, 0};

        for (const auto& a : c1) {
            for (const auto& b : c1) {
                std::vector<PhysicalOp> ops;
                local(ops, a, 0);
                local(ops, b, 1);
                add(std::move(ops));
            }
        }
        for (const auto& a : c1) {
            for (const auto& b : c1) {
                for (const auto& s : s1) {
                    for (const auto& t : s1) {
                        std::vector<PhysicalOp> ops;
                        local(ops, a, 0);
                        local(ops, b, 1);
                        ops.push_back(cz);
                        local(ops, s, 0);
                        local(ops, t, 1);
                        add(std::move(ops));
                    }
                }
            }
        }
        for (const auto& a : c1) {
            for (const auto& b : c1) {
                for (const auto& s : s1) {
                    for (const auto& t : s1) {
                        std::vector<PhysicalOp> ops;
                        local(ops, a, 0);
                        local(ops, b, 1);
                        ops.push_back(cz);
                        ops.push_back({G::Y90, 0});
                        ops.push_back({G::MX90, 1});
                        ops.push_back(cz);
                        local(ops, s, 0);
                        ops.push_back({G::Y90, 0});
                        local(ops, t, 1);
                        ops.push_back({G::MX90, 1});
                        add(std::move(ops));
                    }
                }
            }
        }
        for (const auto& a : c1) {
            for (const auto& b : c1) {
                std::vector<PhysicalOp> ops;
                local(ops, a, 0);
                local(ops, b, 1);
                ops.push_back(cz);
                ops.push_back({G::MY90, 0});
                ops.push_back({G::Y90, 1});
                ops.push_back(cz);
                ops.push_back({G::Y90, 0});
                ops.push_back({G::MY90, 1});
                ops.push_back(cz);
                ops.push_back({G::Y90, 1});
                add(std::move(ops));
            }
        }
    }

    int qubit_count_;
    std::vector<CliffordElement> elements_;
    std::unordered_map<std::vector<std::int64_t>, std::uint32_t, detail::KeyHash> index_;
    std::vector<std::uint32_t> inverses_;
    std::vector<std::uint32_t> table_;
    std::uint32_t identity_ = 0;
};

inline std::span<const CliffordElement> enumerate_group(int qubit_count) {
    return CliffordGroup::get(qubit_count).elements();
}

inline CliffordElement compose(const CliffordElement& a, const CliffordElement& b) {
    if (a.qubit_count != b.qubit_count) {
        throw std::invalid_argument("compose: qubit counts differ (" + std::to_string(a.qubit_count) + " vs " +
                                    std::to_string(b.qubit_count) + ")");
    }
    const auto& g = CliffordGroup::get(a.qubit_count);
    return g[g.compose_index(a.index, b.index)];
}

inline CliffordElement invert(const CliffordElement& a) {
    const auto& g = CliffordGroup::get(a.qubit_count);
    return g[g.inverse_index(a.index)];
}

/// A gate inserted after every random Clifford. Its ideal action must be a
/// group element; the physical realization is up to the simulator.
struct InterleavedGate {
    std::string label;
    MatX ideal;
};

inline InterleavedGate interleaved_from_label(std::string_view label, int qubit_count) {
    if (label == "IDLE" || label == "STEP") {
        const int d = 1 << qubit_count;
        return {std::string(label), MatX::Identity(d, d)};
    }
    auto g = parse_gate_label(label);
    if (!g) {
        throw std::invalid_argument("unknown interleaved gate '" + std::string(label) + "'");
    }
    if (*g == GateKind::CZ && qubit_count != 2) {
        throw std::invalid_argument("CZ interleaving needs two qubits");
    }
    return {std::string(label), ideal_op_unitary({*g, 0}, qubit_count)};
}

/// Group index of the interleaved gate's ideal action; throws when the gate
/// is outside the group (no in-group recovery exists).
inline std::uint32_t interleaved_index(const InterleavedGate& gate, int qubit_count) {
    auto idx = CliffordGroup::get(qubit_count).find(gate.ideal);
    if (!idx) {
        throw std::invalid_argument("interleaved gate '" + gate.label + "' is not a Clifford");
    }
    return *idx;
}

struct RbSequence {
    int m = 0;
    int qubit_count = 1;
    std::vector<std::uint32_t> elements;
    std::optional<InterleavedGate> interleaved;
    std::uint32_t recovery = 0;

    const CliffordGroup& group() const { return CliffordGroup::get(qubit_count); }
};

namespace detail {
inline std::uint32_t recovery_index(const CliffordGroup& g, std::span<const std::uint32_t> seq,
                                    std::optional<std::uint32_t> inter) {
    std::uint32_t total = g.identity_index();
    for (std::uint32_t e : seq) {
        total = g.compose_index(total, e);
        if (inter) {
            total = g.compose_index(total, *inter);
        }
    }
    return g.inverse_index(total);
}
}  // namespace detail

inline CliffordElement recovery_for(std::span<const CliffordElement> sequence,
                                    const std::optional<InterleavedGate>& interleaved = std::nullopt) {
    if (sequence.empty()) {
        throw std::invalid_argument("recovery_for: empty sequence");
    }
    const int n = sequence.front().qubit_count;
    std::vector<std::uint32_t> idx;
    idx.reserve(sequence.size());
    for (const auto& e : sequence) {
        if (e.qubit_count != n) {
            throw std::invalid_argument("recovery_for: mixed qubit counts");
        }
        idx.push_back(e.index);
    }
    std::optional<std::uint32_t> inter;
    if (interleaved) {
        inter = interleaved_index(*interleaved, n);
    }
    const auto& g = CliffordGroup::get(n);
    return g[detail::recovery_index(g, idx, inter)];
}

inline RbSequence sample_sequence(int m, int qubit_count, const std::optional<InterleavedGate>& interleaved,
                                  std::uint64_t seed) {
    if (m < 1) {
        throw std::invalid_argument("sample_sequence: m must be >= 1, got " + std::to_string(m));
    }
    const auto& g = CliffordGroup::get(qubit_count);
    std::optional<std::uint32_t> inter;
    if (interleaved) {
        inter = interleaved_index(*interleaved, qubit_count);
    }
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(g.size() - 1));
    RbSequence s;
    s.m = m;
    s.qubit_count = qubit_count;
    s.interleaved = interleaved;
    s.elements.resize(static_cast<std::size_t>(m));
    for (auto& e : s.elements) {
        e = pick(rng);
    }
    s.recovery = detail::recovery_index(g, s.elements, inter);
    return s;
}

/// Ideal total unitary of the sequence including interleaved gates and the
/// recovery element.
inline MatX ideal_sequence_unitary(const RbSequence& s) {
    const auto& g = s.group();
    const int d = 1 << s.qubit_count;
    MatX u = MatX::Identity(d, d);
    for (std::uint32_t e : s.elements) {
        u = g[e].unitary * u;
        if (s.interleaved) {
            u = s.interleaved->ideal * u;
        }
    }
    return g[s.recovery].unitary * u;
}

/// One line per element: label, decomposition, cz_count.
inline void dump_group_table(std::ostream& out, int qubit_count) {
    for (const auto& e : enumerate_group(qubit_count)) {
        out << e.label() << '\t' << e.decomposition_string() << '\t' << e.cz_count << '\n';
    }
}

}  // namespace orbitlab
