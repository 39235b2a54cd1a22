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

#include "orbitlab/config.hpp"
#include "orbitlab/io.hpp"
#include "orbitlab/line_response.hpp"
#include "orbitlab/scenarios.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef ORBITLAB_VERSION
#define ORBITLAB_VERSION "0.0.0"
#endif

namespace orbitlab {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"rb-curve",     "landscape-x2",  "orbit-x2",   "orbit-cz",
                                                   "bleedthrough", "crosstalk-map", "sensitivity"};
    return names;
}

inline std::string scenario_description(const std::string& name) {
    static const std::map<std::string, std::string> d = {
        {"rb-curve", "single-qubit Clifford RB decay of qubit 0"},
        {"landscape-x2", "X/2 sequence fidelity vs amplitude, frequency and DRAG at several m"},
        {"orbit-x2", "closed-loop tuning of a perturbed X/2 pulse"},
        {"orbit-cz", "closed-loop tuning of a perturbed CZ trajectory"},
        {"bleedthrough", "closed-loop tuning of a two-pole Z-line predistortion"},
        {"crosstalk-map", "added error on a victim qubit vs aggressor detuning and gate length"},
        {"sensitivity", "dF/dr vs sequence length for several Clifford errors"},
    };
    return d.at(name);
}

/// One experiment: what was run, with what, and what came out. `artifacts`
/// maps file names (relative to the output directory) to their contents.
struct RunRecord {
    std::string scenario;
    Config config;
    std::uint64_t seed = 0;
    Json results;
    std::map<std::string, std::string> artifacts;
    std::optional<double> wall_clock_seconds;
    std::string version = ORBITLAB_VERSION;
};

// ---------------------------------------------------------------------------
// CSV and JSON views of the engine types.

inline std::string curve_csv(const RbCurve& c) {
    std::ostringstream o;
    o << "m,seq_index,fidelity\n";
    for (std::size_t i = 0; i < c.m_values.size(); ++i) {
        for (std::size_t s = 0; s < c.fidelities[i].size(); ++s) {
            o << c.m_values[i] << ',' << s << ',' << fmt_num(c.fidelities[i][s]) << '\n';
        }
    }
    return o.str();
}

inline std::string trace_csv(const OptimizationTrace& t) {
    std::ostringstream o;
    o << "eval_index,cost,best_cost";
    const std::size_t d = t.evaluations.empty() ? t.best_params.size() : t.evaluations.front().params.size();
    for (std::size_t j = 0; j < d; ++j) {
        o << ",param_" << j + 1;
    }
    o << '\n';
    for (std::size_t i = 0; i < t.evaluations.size(); ++i) {
        const auto& e = t.evaluations[i];
        o << i << ',' << fmt_num(e.cost) << ',' << fmt_num(e.best_cost);
        for (double p : e.params) {
            o << ',' << fmt_num(p);
        }
        o << '\n';
    }
    return o.str();
}

/// Sampled waveform as (time_ns, value) rows, time at the start of each sample.
inline std::string waveform_csv(const Waveform& w) {
    std::ostringstream o;
    o << "time_ns,value\n";
    for (std::size_t n = 0; n < w.samples.size(); ++n) {
        o << fmt_num(static_cast<double>(n) * w.dt_ns) << ',' << fmt_num(w.samples[n]) << '\n';
    }
    return o.str();
}

inline std::string map_csv(const CrosstalkMap& map) {
    std::ostringstream o;
    o << "delta_GHz,tgate_ns,seq_fidelity,inferred_error\n";
    for (const auto& c : map.cells) {
        o << fmt_num(c.detuning_ghz) << ',' << fmt_num(c.gate_length_ns) << ',' << fmt_num(c.seq_fidelity) << ','
          << fmt_num(c.inferred_error) << '\n';
    }
    return o.str();
}

inline Json fit_json(const DecayFit& f) {
    return Json{{"A", f.A},           {"B", f.B},         {"p", f.p}, {"r", f.r}, {"residual", f.residual},
                {"converged", f.converged}, {"qubit_count", f.qubit_count}};
}

inline Json curve_json(const RbCurve& c) {
    Json means = Json::array();
    Json sems = Json::array();
    for (std::size_t i = 0; i < c.m_values.size(); ++i) {
        means.push_back(c.mean(i));
        sems.push_back(c.standard_error(i));
    }
    return Json{{"mode", c.mode}, {"qubit_count", c.qubit_count}, {"k", c.k}, {"m", c.m_values},
                {"mean", means},  {"standard_error", sems}};
}

inline Json verification_json(const GateVerification& v) {
    return Json{{"reference_curve", curve_json(v.reference_curve)},
                {"interleaved_curve", curve_json(v.interleaved_curve)},
                {"reference_fit", fit_json(v.reference)},
                {"interleaved_fit", fit_json(v.interleaved)},
                {"gate_error", v.gate.r},
                {"gate_error_negative", v.gate.negative}};
}

inline Json trace_summary_json(const OptimizationTrace& t) {
    return Json{{"evaluations", t.evaluation_count},
                {"best_cost", t.best_cost},
                {"best_params", t.best_params},
                {"converged", t.converged}};
}

inline Json config_json(const Config& c) {
    Json j = Json::object();
    visit_config(c, [&](const std::string& key, const auto& value, const std::string&) { j[key] = value; });
    return j;
}

inline Json record_json(const RunRecord& r) {
    std::vector<std::string> files;
    for (const auto& [name, content] : r.artifacts) {
        files.push_back(name);
    }
    files.push_back("record.json");
    Json j{{"scenario", r.scenario},
           {"version", r.version},
           {"seed", r.seed},
           {"config", config_json(r.config)},
           {"results", r.results},
           {"artifacts", files}};
    j["wall_clock_seconds"] = r.wall_clock_seconds ? Json(*r.wall_clock_seconds) : Json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Plots.

inline Series curve_series(const RbCurve& c, const std::string& label) {
    Series s{label, {}, {}, true, false};
    for (std::size_t i = 0; i < c.m_values.size(); ++i) {
        s.x.push_back(c.m_values[i]);
        s.y.push_back(c.mean(i));
    }
    return s;
}

inline Series fit_series(const DecayFit& f, const std::vector<int>& m_values, const std::string& label) {
    Series s{label, {}, {}, false, true};
    if (m_values.empty()) {
        return s;
    }
    const int lo = *std::min_element(m_values.begin(), m_values.end());
    const int hi = *std::max_element(m_values.begin(), m_values.end());
    for (int i = 0; i <= 100; ++i) {
        const double m = lo + (hi - lo) * i / 100.0;
        s.x.push_back(m);
        s.y.push_back(f.A * std::pow(f.p, m) + f.B);
    }
    return s;
}

inline std::string verification_svg(const std::string& title, const GateVerification& before,
                                     const GateVerification& after) {
    const auto& m = before.reference_curve.m_values;
    return svg_line_plot({title, "Number of Cliffords m", "Sequence fidelity", false},
                         {curve_series(before.reference_curve, "reference, before"),
                          curve_series(before.interleaved_curve, "interleaved, before"),
                          curve_series(after.reference_curve, "reference, after"),
                          curve_series(after.interleaved_curve, "interleaved, after"),
                          fit_series(before.interleaved, m, "fit, before"),
                          fit_series(after.interleaved, m, "fit, after")});
}

inline std::string trace_svg(const std::string& title, const OptimizationTrace& t) {
    Series cost{"cost", {}, {}, true, false};
    Series best{"best so far", {}, {}, false, true};
    for (std::size_t i = 0; i < t.evaluations.size(); ++i) {
        cost.x.push_back(static_cast<double>(i));
        cost.y.push_back(t.evaluations[i].cost);
        best.x.push_back(static_cast<double>(i));
        best.y.push_back(t.evaluations[i].best_cost);
    }
    return svg_line_plot({title, "Evaluation", "Cost (1 - sequence fidelity)", false}, {cost, best});
}

// Bands anchored at added error 0.0005 (negligible) and 0.01 (strong).
inline std::vector<LegendBand> crosstalk_bands() {
    const double inf = std::numeric_limits<double>::infinity();
    return {{-inf, 0.0005, "#2c7bb6", "added error < 0.0005"},
            {0.0005, 0.01, "#fdae61", "0.0005 to 0.01"},
            {0.01, inf, "#d7191c", "added error > 0.01"}};
}

// ---------------------------------------------------------------------------
// Scenarios.

namespace detail {

inline OrbitSettings settings(const Config& c, int m, int k, int max_evaluations, int fresh_sequences,
                              const std::vector<int>& verify_m, int parallel) {
    OrbitSettings s;
    s.fresh_sequences = fresh_sequences != 0;
    s.m = m;
    s.k = k;
    s.repetitions = c.repetitions;
    s.max_evaluations = max_evaluations;
    s.parallel = parallel;
    s.verify_m = verify_m;
    s.verify_k = c.verify_k;
    return s;
}

inline void run_rb_curve_scenario(RunRecord& r, int parallel) {
    const Config& c = r.config;
    RbRunOptions o;
    o.k = c.rb_k;
    o.repetitions = c.repetitions;
    o.parallel = parallel;
    const RbCurve curve = run_rb_curve(GateSetBackend(c.device, 1), c.rb_m_values, o, r.seed);
    const DecayFit fit = fit_decay(curve);
    r.results = Json{{"curve", curve_json(curve)}, {"fit", fit_json(fit)}};
    r.artifacts["curve.csv"] = curve_csv(curve);
    r.artifacts["curve.svg"] = svg_line_plot({"Single-qubit randomized benchmarking", "Number of Cliffords m",
                                              "Sequence fidelity", false},
                                             {curve_series(curve, "data"), fit_series(fit, curve.m_values, "fit")});
}

inline void run_landscape_scenario(RunRecord& r, int parallel) {
    const Config& c = r.config;
    const auto points = landscape_x2(c.device, c.landscape_m_values, c.landscape_points, c.landscape_k, c.repetitions,
                                     parallel, r.seed);
    std::ostringstream csv;
    csv << "parameter,value,m,fidelity\n";
    Json j = Json::array();
    for (const auto& p : points) {
        csv << p.parameter << ',' << fmt_num(p.value) << ',' << p.m << ',' << fmt_num(p.fidelity) << '\n';
    }
    for (const char* name : {"amplitude_ghz", "drive_frequency_ghz", "drag"}) {
        std::vector<Series> series;
        for (int m : c.landscape_m_values) {
            Series s{"m = " + std::to_string(m), {}, {}, true, true};
            for (const auto& p : points) {
                if (p.parameter == name && p.m == m) {
                    s.x.push_back(p.value);
                    s.y.push_back(p.fidelity);
                }
            }
            series.push_back(s);
        }
        r.artifacts[std::string("landscape_") + name + ".svg"] =
            svg_line_plot({std::string("X/2 landscape: ") + name, name, "Sequence fidelity", false}, series);
    }
    r.artifacts["landscape.csv"] = csv.str();
    r.results = Json{{"points", points.size()}, {"center", {c.device.xy[0].amplitude_ghz,
                                                           c.device.xy[0].drive_frequency_ghz, c.device.xy[0].drag}}};
}

inline void add_verification(RunRecord& r, const GateVerification& before, const GateVerification& after,
                             const std::string& title) {
    r.artifacts["verify_before_reference.csv"] = curve_csv(before.reference_curve);
    r.artifacts["verify_before_interleaved.csv"] = curve_csv(before.interleaved_curve);
    r.artifacts["verify_after_reference.csv"] = curve_csv(after.reference_curve);
    r.artifacts["verify_after_interleaved.csv"] = curve_csv(after.interleaved_curve);
    r.artifacts["verification.svg"] = verification_svg(title, before, after);
    r.results["before"] = verification_json(before);
    r.results["after"] = verification_json(after);
}

inline void run_orbit_x2_scenario(RunRecord& r, int parallel) {
    const Config& c = r.config;
    DeviceModel d = c.device;
    d.xy[0] = perturb_xy(d.xy[0], {c.x2_amplitude_error, c.x2_detuning_ghz, c.x2_drag_offset});
    const OrbitSettings s =
        settings(c, c.x2_m, c.x2_k, c.x2_max_evaluations, c.x2_fresh_sequences, c.x2_verify_m, parallel);
    const X2Result x = optimize_x2(d, s, r.seed);
    r.results = Json{{"start", {x.start.amplitude_ghz, x.start.drive_frequency_ghz, x.start.drag}},
                     {"tuned", {x.tuned.amplitude_ghz, x.tuned.drive_frequency_ghz, x.tuned.drag}},
                     {"parameters", {"amplitude_ghz", "drive_frequency_ghz", "drag"}},
                     {"optimizer", trace_summary_json(x.trace)}};
    r.artifacts["trace.csv"] = trace_csv(x.trace);
    r.artifacts["trace.svg"] = trace_svg("ORBIT X/2 optimization", x.trace);
    add_verification(r, x.before, x.after, "X/2 interleaved RB before and after");
}

inline void run_orbit_cz_scenario(RunRecord& r, int parallel) {
    const Config& c = r.config;
    const DeviceModel d = perturb_cz(c.device, c.cz_target_reference_error, r.seed);
    const OrbitSettings s =
        settings(c, c.cz_m, c.cz_k, c.cz_max_evaluations, c.cz_fresh_sequences, c.cz_verify_m, parallel);
    const CzResult x = optimize_cz(d, s, r.seed, c.single_qubit_verify_m);
    r.results = Json{{"start", x.start},
                     {"tuned", x.tuned},
                     {"parameters", {"excursion_ghz", "ramp_ns", "hold_ns", "shoulder", "fourier1", "fourier2",
                                     "phase0_rad", "phase1_rad"}},
                     {"optimizer", trace_summary_json(x.trace)},
                     {"single_qubit_gate_error", x.r_single_before},
                     {"expected_reference_error_before", x.expected_before},
                     {"expected_reference_error_after", x.expected_after}};
    r.artifacts["trace.csv"] = trace_csv(x.trace);
    r.artifacts["trace.svg"] = trace_svg("ORBIT CZ optimization", x.trace);
    add_verification(r, x.before, x.after, "CZ interleaved RB before and after");
}

inline void run_bleedthrough_scenario(RunRecord& r, int parallel) {
    const Config& c = r.config;
    const OrbitSettings s =
        settings(c, c.step_m, c.step_k, c.step_max_evaluations, c.step_fresh_sequences, c.step_verify_m, parallel);
    const DeconvolutionResult x = optimize_deconvolution(c.device, s, r.seed);
    Json forward = Json::array();
    for (const auto& p : c.device.line.poles) {
        forward.push_back({{"amplitude", p.amplitude}, {"rate_per_ns", p.rate}});
    }
    r.results = Json{{"forward_poles", forward},
                     {"tuned", {{"a1", x.tuned[0]},
                                {"gamma1_per_ns", x.tuned[1]},
                                {"a2", x.tuned[2]},
                                {"gamma2_per_ns", x.tuned[3]},
                                {"phase_rad", x.tuned[4]}}},
                     {"optimizer", trace_summary_json(x.trace)},
                     {"max_phase_deviation_before_rad", max_abs(x.phase_before)},
                     {"max_phase_deviation_after_rad", max_abs(x.phase_after)}};
    std::ostringstream csv;
    csv << "t_ns,phase_before_rad,phase_after_rad\n";
    Series before{"no predistortion", {}, {}, false, true};
    Series after{"tuned predistortion", {}, {}, false, true};
    for (std::size_t i = 0; i < x.probe_times.size(); ++i) {
        csv << fmt_num(x.probe_times[i]) << ',' << fmt_num(x.phase_before[i]) << ',' << fmt_num(x.phase_after[i])
            << '\n';
        before.x.push_back(x.probe_times[i]);
        before.y.push_back(x.phase_before[i]);
        after.x.push_back(x.probe_times[i]);
        after.y.push_back(x.phase_after[i]);
    }
    r.artifacts["phase.csv"] = csv.str();
    // Z-line detuning seen by the qubit for the step, without and with the tuned predistortion.
    const DeviceModel tuned = with_correction(c.device, x.trace.best_params);
    const Waveform ideal = c.device.step.ideal_waveform(c.device.dt_ns);
    r.artifacts["z_waveform_before.csv"] = waveform_csv(line_output(ideal, c.device.line, nullptr));
    r.artifacts["z_waveform_after.csv"] = waveform_csv(line_output(ideal, tuned.line, &*tuned.correction));
    r.artifacts["phase.svg"] =
        svg_line_plot({"Phase error after the step", "Time (ns)", "Phase deviation (rad)", false}, {before, after});
    r.artifacts["trace.csv"] = trace_csv(x.trace);
    r.artifacts["trace.svg"] = trace_svg("ORBIT predistortion optimization", x.trace);
    add_verification(r, x.before, x.after, "Step interleaved RB before and after");
}

inline void run_crosstalk_scenario(RunRecord& r, int parallel) {
    const Config& c = r.config;
    const CrosstalkMap map = crosstalk_map(c.device, c.crosstalk_detunings_ghz, c.crosstalk_gate_lengths_ns,
                                           c.crosstalk_m, c.crosstalk_k, c.repetitions, c.crosstalk_reference_m,
                                           parallel, r.seed);
    Json cells = Json::array();
    std::vector<double> added;
    std::vector<double> raw;
    for (const auto& cell : map.cells) {
        cells.push_back({{"delta_GHz", cell.detuning_ghz},
                         {"tgate_ns", cell.gate_length_ns},
                         {"seq_fidelity", cell.seq_fidelity},
                         {"seq_fidelity_sem", cell.seq_fidelity_sem},
                         {"inferred_error", cell.inferred_error},
                         {"added_error", cell.added_error},
                         {"added_error_sigma", cell.added_error_sigma},
                         {"clamped", cell.clamped}});
        added.push_back(cell.added_error);
        raw.push_back(cell.seq_fidelity);
    }
    r.results = Json{{"m", map.m},
                     {"reference_curve", curve_json(map.reference_curve)},
                     {"reference_fit", fit_json(map.reference)},
                     {"cells", cells}};
    r.artifacts["map.csv"] = map_csv(map);
    r.artifacts["reference_curve.csv"] = curve_csv(map.reference_curve);
    r.artifacts["map.svg"] = svg_band_map({"Added error from crosstalk", "Aggressor detuning (GHz)",
                                           "Aggressor gate length (ns)", false},
                                          c.crosstalk_detunings_ghz, c.crosstalk_gate_lengths_ns, added,
                                          crosstalk_bands());
    const std::vector<LegendBand> fidelity_bands = {{-1.0, 0.6, "#d7191c", "F < 0.6"},
                                                    {0.6, 0.8, "#fdae61", "0.6 to 0.8"},
                                                    {0.8, 0.9, "#abd9e9", "0.8 to 0.9"},
                                                    {0.9, 2.0, "#2c7bb6", "F > 0.9"}};
    r.artifacts["seq_fidelity.svg"] =
        svg_band_map({"Sequence fidelity at m = " + std::to_string(map.m), "Aggressor detuning (GHz)",
                      "Aggressor gate length (ns)", false},
                     c.crosstalk_detunings_ghz, c.crosstalk_gate_lengths_ns, raw, fidelity_bands);
}

inline void run_sensitivity_scenario(RunRecord& r) {
    const Config& c = r.config;
    const auto pts = sensitivity_curves(c.sensitivity_errors, c.sensitivity_amplitude, c.sensitivity_m_max,
                                        c.sensitivity_m_step);
    std::ostringstream csv;
    csv << "r,m,dF_dr\n";
    std::vector<Series> series;
    Json peaks = Json::array();
    for (double err : c.sensitivity_errors) {
        Series s{"r = " + fmt_num(err), {}, {}, false, true};
        for (const auto& p : pts) {
            if (p.r == err) {
                s.x.push_back(p.m);
                s.y.push_back(std::abs(p.dF_dr));
            }
        }
        series.push_back(s);
        const Sensitivity at = sensitivity(err, c.sensitivity_amplitude, optimal_m(err));
        peaks.push_back({{"r", err}, {"optimal_m", at.optimal_m}, {"dF_dr_at_optimal", at.dF_dr_at_optimal},
                         {"fractional", at.fractional}});
    }
    for (const auto& p : pts) {
        csv << fmt_num(p.r) << ',' << p.m << ',' << fmt_num(p.dF_dr) << '\n';
    }
    r.results = Json{{"amplitude", c.sensitivity_amplitude}, {"peaks", peaks}};
    r.artifacts["sensitivity.csv"] = csv.str();
    r.artifacts["sensitivity.svg"] =
        svg_line_plot({"Sensitivity of sequence fidelity to error", "Number of Cliffords m", "|dF/dr|", false}, series);
}

}  // namespace detail

/// Runs one named scenario. The record depends only on (name, config, seed);
/// `parallel` changes speed, not results.
inline RunRecord run_scenario(const std::string& name, const Config& config, std::uint64_t seed, int parallel = 1) {
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string list;
        for (const auto& n : names) {
            list += (list.empty() ? "" : ", ") + n;
        }
        throw std::invalid_argument("unknown scenario '" + name + "'; valid scenarios: " + list);
    }
    RunRecord r;
    r.scenario = name;
    r.config = config;
    r.seed = seed;
    if (name == "rb-curve") {
        detail::run_rb_curve_scenario(r, parallel);
    } else if (name == "landscape-x2") {
        detail::run_landscape_scenario(r, parallel);
    } else if (name == "orbit-x2") {
        detail::run_orbit_x2_scenario(r, parallel);
    } else if (name == "orbit-cz") {
        detail::run_orbit_cz_scenario(r, parallel);
    } else if (name == "bleedthrough") {
        detail::run_bleedthrough_scenario(r, parallel);
    } else if (name == "crosstalk-map") {
        detail::run_crosstalk_scenario(r, parallel);
    } else {
        detail::run_sensitivity_scenario(r);
    }
    return r;
}

/// Writes every artifact and the JSON record into `dir`, each through a
/// temporary file and rename. The directory must exist.
inline std::vector<std::filesystem::path> write_outputs(const RunRecord& r, const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error("output directory '" + dir.string() + "' does not exist");
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [file, content] : r.artifacts) {
        write_file_atomic(dir / file, content);
        written.push_back(dir / file);
    }
    write_file_atomic(dir / "record.json", record_json(r).dump(2) + "\n");
    written.push_back(dir / "record.json");
    return written;
}

}  // namespace orbitlab
