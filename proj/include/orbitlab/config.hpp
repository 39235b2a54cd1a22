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

#include "orbitlab/device.hpp"
#include "orbitlab/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace orbitlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a scenario run reads: the device plus per-scenario settings.
struct Config {
    DeviceModel device = default_device();

    // rb-curve
    std::vector<int> rb_m_values{1, 25, 50, 100, 200, 400, 800};
    int rb_k = 40;
    int repetitions = 900;  // shots per sequence for every scenario; --exact sets 0

    // landscape-x2
    std::vector<int> landscape_m_values{1, 50, 100, 300};
    int landscape_points = 21;
    int landscape_k = 20;

    // orbit-x2
    int x2_m = 10;
    int x2_k = 80;
    int x2_max_evaluations = 300;
    double x2_amplitude_error = 0.05;
    double x2_detuning_ghz = 0.002;
    double x2_drag_offset = 0.3;
    int x2_fresh_sequences = 1;  // 1: new random sequences per evaluation, 0: one fixed set
    std::vector<int> x2_verify_m{1, 25, 50, 100, 200, 400, 800};

    // orbit-cz
    int cz_m = 30;
    int cz_k = 20;
    int cz_max_evaluations = 300;
    double cz_target_reference_error = 0.036;
    int cz_fresh_sequences = 1;
    std::vector<int> cz_verify_m{1, 5, 10, 20, 30, 50, 80};
    std::vector<int> single_qubit_verify_m{1, 50, 100, 200, 400, 800};
    int verify_k = 40;

    // bleedthrough
    int step_m = 30;
    int step_k = 20;
    int step_max_evaluations = 300;
    int step_fresh_sequences = 1;
    std::vector<int> step_verify_m{1, 5, 10, 20, 40, 80, 150, 300};

    // crosstalk-map
    std::vector<double> crosstalk_detunings_ghz{-0.66, -0.55, -0.44, -0.33, -0.22, -0.11, 0.0, 0.11, 0.22, 0.33, 0.44};
    std::vector<double> crosstalk_gate_lengths_ns{4.0, 7.6, 11.2, 14.8, 18.4, 22.0, 25.6, 29.2, 32.8, 36.4, 40.0};
    int crosstalk_m = 35;
    int crosstalk_k = 20;
    std::vector<int> crosstalk_reference_m{1, 20, 50, 100, 200, 400, 800};

    // sensitivity
    std::vector<double> sensitivity_errors{0.001, 0.0005};
    double sensitivity_amplitude = 0.5;
    int sensitivity_m_max = 3000;
    int sensitivity_m_step = 5;
};

namespace detail {

enum class FieldKind { kDouble, kInt, kIntList, kDoubleList };

struct ConfigField {
    std::string key;
    FieldKind kind;
    double min;
    double max;
    std::string unit;
    std::function<double*(Config&)> real;
    std::function<int*(Config&)> integer;
    std::function<std::vector<int>*(Config&)> int_list;
    std::function<std::vector<double>*(Config&)> real_list;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline ConfigField real_field(std::string key, double lo, double hi, std::string unit,
                              std::function<double*(Config&)> f) {
    ConfigField c{std::move(key), FieldKind::kDouble, lo, hi, std::move(unit), std::move(f), {}, {}, {}};
    return c;
}

inline ConfigField int_field(std::string key, double lo, double hi, std::function<int*(Config&)> f) {
    return {std::move(key), FieldKind::kInt, lo, hi, "", {}, std::move(f), {}, {}};
}

inline ConfigField int_list_field(std::string key, double lo, double hi, std::function<std::vector<int>*(Config&)> f) {
    return {std::move(key), FieldKind::kIntList, lo, hi, "", {}, {}, std::move(f), {}};
}

inline ConfigField real_list_field(std::string key, double lo, double hi, std::string unit,
                                   std::function<std::vector<double>*(Config&)> f) {
    return {std::move(key), FieldKind::kDoubleList, lo, hi, std::move(unit), {}, {}, {}, std::move(f)};
}

inline const std::vector<ConfigField>& config_schema() {
    static const std::vector<ConfigField> schema = [] {
        std::vector<ConfigField> s;
        for (int q = 0; q < 2; ++q) {
            const std::string p = "qubit" + std::to_string(q) + ".";
            const auto i = static_cast<std::size_t>(q);
            s.push_back(
                real_field(p + "f10_ghz", 1.0, 20.0, "GHz", [i](Config& c) { return &c.device.qubits[i].f10_ghz; }));
            s.push_back(real_field(p + "anharmonicity_ghz", -2.0, 2.0, "GHz",
                                   [i](Config& c) { return &c.device.qubits[i].anharmonicity_ghz; }));
            s.push_back(int_field(p + "levels", 3, 3, [i](Config& c) { return &c.device.qubits[i].levels; }));
            s.push_back(real_field(p + "xy_amplitude_ghz", 0.0, 1.0, "GHz",
                                   [i](Config& c) { return &c.device.xy[i].amplitude_ghz; }));
            s.push_back(real_field(p + "xy_drive_frequency_ghz", 1.0, 20.0, "GHz",
                                   [i](Config& c) { return &c.device.xy[i].drive_frequency_ghz; }));
            s.push_back(real_field(p + "xy_drag", -10.0, 10.0, "", [i](Config& c) { return &c.device.xy[i].drag; }));
            s.push_back(real_field(p + "xy_length_ns", 1.0, 1000.0, "ns",
                                   [i](Config& c) { return &c.device.xy[i].length_ns; }));
        }
        const char* cz_names[] = {"excursion_ghz", "ramp_ns", "hold_ns", "shoulder",
                                  "fourier1", "fourier2", "phase0_rad", "phase1_rad"};
        const double cz_lo[] = {-2.0, 0.1, 0.0, -5.0, -5.0, -5.0, -100.0, -100.0};
        const double cz_hi[] = {2.0, 500.0, 1000.0, 5.0, 5.0, 5.0, 100.0, 100.0};
        for (std::size_t j = 0; j < 8; ++j) {
            s.push_back(real_field(std::string("cz.") + cz_names[j], cz_lo[j], cz_hi[j], "",
                                   [j](Config& c) { return &c.device.cz.params[j]; }));
        }
        s.push_back(
            real_field("cz.total_time_ns", 1.0, 2000.0, "ns", [](Config& c) { return &c.device.cz.total_time_ns; }));
        s.push_back(
            real_field("cz.coupling_ghz", 0.0, 0.5, "GHz", [](Config& c) { return &c.device.cz.coupling_ghz; }));
        s.push_back(real_field("cz.coupler_activation_ghz", 1e-6, 2.0, "GHz",
                               [](Config& c) { return &c.device.cz.coupler_activation_ghz; }));
        s.push_back(real_field("spam.prep_error", 0.0, 1.0, "", [](Config& c) { return &c.device.spam.prep_error; }));
        s.push_back(
            real_field("spam.readout_error_0", 0.0, 1.0, "", [](Config& c) { return &c.device.spam.readout_error_0; }));
        s.push_back(
            real_field("spam.readout_error_1", 0.0, 1.0, "", [](Config& c) { return &c.device.spam.readout_error_1; }));
        s.push_back(real_field("noise.sq_depolarizing", 0.0, 1.0, "",
                               [](Config& c) { return &c.device.noise.sq_depolarizing; }));
        s.push_back(real_field("noise.cz_depolarizing", 0.0, 1.0, "",
                               [](Config& c) { return &c.device.noise.cz_depolarizing; }));
        for (std::size_t j = 0; j < 2; ++j) {
            const std::string n = std::to_string(j + 1);
            s.push_back(
                real_field("line.a" + n, -1.0, 1.0, "", [j](Config& c) { return &c.device.line.poles[j].amplitude; }));
            s.push_back(real_field("line.gamma" + n + "_per_ns", 1e-6, 100.0, "1/ns",
                                   [j](Config& c) { return &c.device.line.poles[j].rate; }));
        }
        s.push_back(
            real_field("step.detuning_ghz", -5.0, 5.0, "GHz", [](Config& c) { return &c.device.step.detuning_ghz; }));
        s.push_back(
            real_field("step.duration_ns", 0.05, 10000.0, "ns", [](Config& c) { return &c.device.step.duration_ns; }));
        s.push_back(
            real_field("step.window_ns", 0.0, 100000.0, "ns", [](Config& c) { return &c.device.step.window_ns; }));
        s.push_back(real_field("crosstalk.area_constant", 1e-6, 100.0, "",
                               [](Config& c) { return &c.device.crosstalk.area_constant; }));
        s.push_back(real_field("crosstalk.relative_coupling", 0.0, 10.0, "",
                               [](Config& c) { return &c.device.crosstalk.relative_coupling; }));
        s.push_back(real_field("sim.dt_ns", 1e-4, 1.0, "ns", [](Config& c) { return &c.device.dt_ns; }));

        s.push_back(int_field("run.repetitions", 0, 1e9, [](Config& c) { return &c.repetitions; }));
        s.push_back(int_field("run.verify_k", 1, 1e6, [](Config& c) { return &c.verify_k; }));
        s.push_back(int_list_field("rb.m_values", 1, 1e6, [](Config& c) { return &c.rb_m_values; }));
        s.push_back(int_field("rb.k", 1, 1e6, [](Config& c) { return &c.rb_k; }));
        s.push_back(int_list_field("landscape.m_values", 1, 1e6, [](Config& c) { return &c.landscape_m_values; }));
        s.push_back(int_field("landscape.points", 2, 1e4, [](Config& c) { return &c.landscape_points; }));
        s.push_back(int_field("landscape.k", 1, 1e6, [](Config& c) { return &c.landscape_k; }));
        s.push_back(int_field("orbit_x2.m", 1, 1e6, [](Config& c) { return &c.x2_m; }));
        s.push_back(int_field("orbit_x2.k", 1, 1e6, [](Config& c) { return &c.x2_k; }));
        s.push_back(int_field("orbit_x2.max_evaluations", 4, 1e7, [](Config& c) { return &c.x2_max_evaluations; }));
        s.push_back(
            real_field("orbit_x2.amplitude_error", -0.9, 10.0, "", [](Config& c) { return &c.x2_amplitude_error; }));
        s.push_back(
            real_field("orbit_x2.detuning_ghz", -1.0, 1.0, "GHz", [](Config& c) { return &c.x2_detuning_ghz; }));
        s.push_back(real_field("orbit_x2.drag_offset", -10.0, 10.0, "", [](Config& c) { return &c.x2_drag_offset; }));
        s.push_back(int_field("orbit_x2.fresh_sequences", 0, 1, [](Config& c) { return &c.x2_fresh_sequences; }));
        s.push_back(int_list_field("orbit_x2.verify_m", 1, 1e6, [](Config& c) { return &c.x2_verify_m; }));
        s.push_back(int_field("orbit_cz.m", 1, 1e6, [](Config& c) { return &c.cz_m; }));
        s.push_back(int_field("orbit_cz.k", 1, 1e6, [](Config& c) { return &c.cz_k; }));
        s.push_back(int_field("orbit_cz.max_evaluations", 9, 1e7, [](Config& c) { return &c.cz_max_evaluations; }));
        s.push_back(real_field("orbit_cz.target_reference_error", 0.0, 0.7, "",
                               [](Config& c) { return &c.cz_target_reference_error; }));
        s.push_back(int_field("orbit_cz.fresh_sequences", 0, 1, [](Config& c) { return &c.cz_fresh_sequences; }));
        s.push_back(int_list_field("orbit_cz.verify_m", 1, 1e6, [](Config& c) { return &c.cz_verify_m; }));
        s.push_back(int_list_field("orbit_cz.single_qubit_verify_m", 1, 1e6,
                                   [](Config& c) { return &c.single_qubit_verify_m; }));
        s.push_back(int_field("bleedthrough.m", 1, 1e6, [](Config& c) { return &c.step_m; }));
        s.push_back(int_field("bleedthrough.k", 1, 1e6, [](Config& c) { return &c.step_k; }));
        s.push_back(
            int_field("bleedthrough.max_evaluations", 6, 1e7, [](Config& c) { return &c.step_max_evaluations; }));
        s.push_back(int_field("bleedthrough.fresh_sequences", 0, 1, [](Config& c) { return &c.step_fresh_sequences; }));
        s.push_back(int_list_field("bleedthrough.verify_m", 1, 1e6, [](Config& c) { return &c.step_verify_m; }));
        s.push_back(real_list_field("crosstalk.detunings_ghz", -10.0, 10.0, "GHz",
                                    [](Config& c) { return &c.crosstalk_detunings_ghz; }));
        s.push_back(real_list_field("crosstalk.gate_lengths_ns", 0.1, 10000.0, "ns",
                                    [](Config& c) { return &c.crosstalk_gate_lengths_ns; }));
        s.push_back(int_field("crosstalk.m", 1, 1e6, [](Config& c) { return &c.crosstalk_m; }));
        s.push_back(int_field("crosstalk.k", 1, 1e6, [](Config& c) { return &c.crosstalk_k; }));
        s.push_back(
            int_list_field("crosstalk.reference_m", 1, 1e6, [](Config& c) { return &c.crosstalk_reference_m; }));
        s.push_back(
            real_list_field("sensitivity.errors", 1e-9, 0.4999, "", [](Config& c) { return &c.sensitivity_errors; }));
        s.push_back(
            real_field("sensitivity.amplitude", 1e-9, 1.0, "", [](Config& c) { return &c.sensitivity_amplitude; }));
        s.push_back(int_field("sensitivity.m_max", 1, 1e8, [](Config& c) { return &c.sensitivity_m_max; }));
        s.push_back(int_field("sensitivity.m_step", 1, 1e6, [](Config& c) { return &c.sensitivity_m_step; }));
        return s;
    }();
    return schema;
}

inline std::string format_real(double v) {
    return fmt_num(v);
}

inline void check_range(const ConfigField& f, double v) {
    if (!(v >= f.min && v <= f.max)) {
        throw ConfigError("config key '" + f.key + "': value " + format_real(v) + " out of range [" +
                          format_real(f.min) + ", " + format_real(f.max) + "]");
    }
}

inline double scalar_real(const ConfigField& f, const YAML::Node& n) {
    if (!n.IsScalar()) {
        throw ConfigError("config key '" + f.key + "': expected a number");
    }
    double v = 0.0;
    if (!YAML::convert<double>::decode(n, v) || !std::isfinite(v)) {
        throw ConfigError("config key '" + f.key + "': '" + n.Scalar() + "' is not a finite number");
    }
    check_range(f, v);
    return v;
}

inline int scalar_int(const ConfigField& f, const YAML::Node& n) {
    if (!n.IsScalar()) {
        throw ConfigError("config key '" + f.key + "': expected an integer");
    }
    long long v = 0;
    if (!YAML::convert<long long>::decode(n, v)) {
        throw ConfigError("config key '" + f.key + "': '" + n.Scalar() + "' is not an integer");
    }
    check_range(f, static_cast<double>(v));
    return static_cast<int>(v);
}

}  // namespace detail

/// Names of every recognized key, in schema order.
inline std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& f : detail::config_schema()) {
        out.push_back(f.key);
    }
    return out;
}

/// Parses a flat key: value document. Missing keys keep their defaults;
/// unknown keys, malformed values and out-of-range values are rejected
/// with the offending key named.
inline Config parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    Config c;
    if (root.IsNull()) {
        return c;
    }
    if (!root.IsMap()) {
        throw ConfigError("malformed config: expected a flat mapping of key: value pairs");
    }
    const auto& schema = detail::config_schema();
    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        const auto it = std::find_if(schema.begin(), schema.end(), [&](const auto& f) { return f.key == key; });
        if (it == schema.end()) {
            throw ConfigError("config key '" + key + "': unknown key");
        }
        const YAML::Node& v = kv.second;
        switch (it->kind) {
            case detail::FieldKind::kDouble:
                *it->real(c) = detail::scalar_real(*it, v);
                break;
            case detail::FieldKind::kInt:
                *it->integer(c) = detail::scalar_int(*it, v);
                break;
            case detail::FieldKind::kIntList:
            case detail::FieldKind::kDoubleList: {
                if (!v.IsSequence() || v.size() == 0) {
                    throw ConfigError("config key '" + key + "': expected a non-empty list like [1, 2, 3]");
                }
                if (it->kind == detail::FieldKind::kIntList) {
                    std::vector<int> out;
                    for (const auto& e : v) {
                        out.push_back(detail::scalar_int(*it, e));
                    }
                    *it->int_list(c) = out;
                } else {
                    std::vector<double> out;
                    for (const auto& e : v) {
                        out.push_back(detail::scalar_real(*it, e));
                    }
                    *it->real_list(c) = out;
                }
                break;
            }
        }
    }
    try {
        c.device.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid device configuration: ") + e.what());
    }
    return c;
}

inline Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Calls `visit(key, value, unit)` for every key in schema order, where
/// value is a double, an int, a std::vector<int> or a std::vector<double>.
template <class Visitor>
void visit_config(const Config& config, Visitor&& visit) {
    Config c = config;
    for (const auto& f : detail::config_schema()) {
        switch (f.kind) {
            case detail::FieldKind::kDouble:
                visit(f.key, *f.real(c), f.unit);
                break;
            case detail::FieldKind::kInt:
                visit(f.key, *f.integer(c), f.unit);
                break;
            case detail::FieldKind::kIntList:
                visit(f.key, *f.int_list(c), f.unit);
                break;
            case detail::FieldKind::kDoubleList:
                visit(f.key, *f.real_list(c), f.unit);
                break;
        }
    }
}

/// Writes every key with its resolved value; parsing the result gives back
/// an identical configuration.
inline std::string emit_config(const Config& config) {
    std::ostringstream out;
    auto text = [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
            return detail::format_real(v);
        } else if constexpr (std::is_same_v<T, int>) {
            return std::to_string(v);
        } else {
            std::string s = "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                s += i ? ", " : "";
                if constexpr (std::is_same_v<T, std::vector<double>>) {
                    s += detail::format_real(v[i]);
                } else {
                    s += std::to_string(v[i]);
                }
            }
            return s + "]";
        }
    };
    visit_config(config, [&](const std::string& key, const auto& value, const std::string& unit) {
        out << key << ": " << text(value);
        if (!unit.empty()) {
            out << "  # " << unit;
        }
        out << '\n';
    });
    return out.str();
}

}  // namespace orbitlab
