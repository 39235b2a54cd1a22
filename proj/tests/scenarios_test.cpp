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


#include "orbitlab/config.hpp"
#include "orbitlab/io.hpp"
#include "orbitlab/run.hpp"
#include "orbitlab/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace orbitlab;
namespace fs = std::filesystem;

namespace {

OrbitSettings quick_settings(int m, int k, int evaluations) {
    OrbitSettings s;
    s.m = m;
    s.k = k;
    s.repetitions = 0;
    s.max_evaluations = evaluations;
    s.fresh_sequences = false;
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("orbitlab_scenarios_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

/// Small crosstalk grid that runs in seconds.
Config small_crosstalk_config() {
    Config c = Config{};
    c.crosstalk_detunings_ghz = {-0.66, 0.0};
    c.crosstalk_gate_lengths_ns = {4.0, 40.0};
    c.crosstalk_k = 4;
    c.crosstalk_reference_m = {1, 20, 50, 100, 200};
    c.repetitions = 0;
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Optimizers

TEST(OrbitX2, StartAtOptimumBarelyMoves) {
    const DeviceModel device = default_device();
    const X2Result r = optimize_x2(device, quick_settings(10, 20, 40), 5, false);
    EXPECT_NEAR(r.tuned.amplitude_ghz / device.xy[0].amplitude_ghz, 1.0, 0.01);
    EXPECT_NEAR(r.tuned.drive_frequency_ghz, device.xy[0].drive_frequency_ghz, 0.0005);
    EXPECT_NEAR(r.tuned.drag, device.xy[0].drag, 0.2);
    EXPECT_LE(r.trace.best_cost, r.trace.evaluations.front().cost);
}

TEST(OrbitX2, PerturbedPulseImproves) {
    DeviceModel device = default_device();
    device.xy[0] = perturb_xy(device.xy[0], X2Perturbation{});
    const X2Result r = optimize_x2(device, quick_settings(10, 20, 80), 6, false);
    EXPECT_LT(r.trace.best_cost, 0.5 * r.trace.evaluations.front().cost);
    EXPECT_LT(std::abs(r.tuned.amplitude_ghz / default_device().xy[0].amplitude_ghz - 1.0), 0.05);
}

TEST(OrbitX2, StartAtDecayFloorIsRejected) {
    DeviceModel device = default_device();
    device.xy[0].amplitude_ghz *= 1.5;
    EXPECT_THROW(optimize_x2(device, quick_settings(400, 4, 10), 1, false), std::runtime_error);
}

TEST(OrbitCz, PerturbationHitsTheTargetReferenceError) {
    const DeviceModel device = default_device();
    const double target = 0.036;
    const DeviceModel p = perturb_cz(device, target, 3);
    const double predicted = expected_reference_error(1.2 * 0.5 * device.noise.sq_depolarizing,
                                                      0.75 * device.noise.cz_depolarizing + cz_coherent_error(p));
    EXPECT_NEAR(predicted, target, 1e-6);
    const DeviceModel again = perturb_cz(device, target, 3);
    EXPECT_EQ(p.cz.params, again.cz.params);
    const DeviceModel other = perturb_cz(device, target, 4);
    EXPECT_NE(p.cz.params, other.cz.params);
}

TEST(OrbitCz, CalibratedTrajectoryHasSmallCoherentError) {
    EXPECT_LT(cz_coherent_error(default_device()), 1e-3);
}

TEST(Deconvolution, ZeroCorrectionLeavesTheDeviceUnchanged) {
    const DeviceModel device = default_device();
    const std::vector<double> zero = {0.0, std::log(0.1), 0.0, std::log(0.01), 0.0};
    const DeviceModel d = with_correction(device, zero);
    ASSERT_TRUE(d.correction.has_value());
    Waveform wf;
    wf.dt_ns = device.dt_ns;
    wf.samples.assign(50, 1.0);
    const Waveform out = distort_step(wf, *d.correction);
    for (std::size_t i = 0; i < wf.samples.size(); ++i) {
        EXPECT_NEAR(out.samples[i], wf.samples[i], 1e-12);
    }
    EXPECT_EQ(d.step_phase_correction, 0.0);
}

TEST(Deconvolution, UndistortedLineKeepsCorrectionSmall) {
    DeviceModel device = default_device();
    device.line.poles.clear();
    OrbitSettings s = quick_settings(30, 4, 25);
    const DeconvolutionResult r = optimize_deconvolution(device, s, 2, false);
    EXPECT_LT(std::abs(r.tuned[0]), 0.01);
    EXPECT_LT(std::abs(r.tuned[2]), 0.01);
}

// ---------------------------------------------------------------------------
// Crosstalk and sensitivity

TEST(Crosstalk, ZeroCouplingAddsNoErrorBeyondStatistics) {
    DeviceModel device = default_device();
    device.crosstalk.relative_coupling = 0.0;
    const Config c = small_crosstalk_config();
    const CrosstalkMap map = crosstalk_map(device, c.crosstalk_detunings_ghz, c.crosstalk_gate_lengths_ns, 35, 8, 0,
                                           c.crosstalk_reference_m, 1, 4);
    ASSERT_EQ(map.cells.size(), 4u);
    // Every cell sees identical dynamics, so every cell is identical.
    for (const auto& cell : map.cells) {
        EXPECT_EQ(cell.seq_fidelity, map.cells.front().seq_fidelity);
        EXPECT_LT(std::abs(cell.added_error), 3.0 * cell.added_error_sigma + 1e-4);
    }
}

TEST(Crosstalk, ResonantFastAggressorIsWorstCell) {
    const Config c = small_crosstalk_config();
    const CrosstalkMap map = crosstalk_map(c.device, c.crosstalk_detunings_ghz, c.crosstalk_gate_lengths_ns, 35, 4,
                                           0, c.crosstalk_reference_m, 1, 4);
    // Cells are detuning-major: (-0.66, 4), (-0.66, 40), (0, 4), (0, 40).
    EXPECT_GT(map.cells[2].added_error, map.cells[3].added_error);
    EXPECT_GT(map.cells[2].added_error, map.cells[0].added_error);
    EXPECT_GT(map.cells[2].added_error, 0.01);
    EXPECT_LT(map.cells[1].added_error, 0.0005);
}

TEST(Sensitivity, CurvesPeakAtOptimalLength) {
    const auto pts = sensitivity_curves({0.001}, 0.5, 3000, 1);
    double best = 0.0;
    int best_m = 0;
    for (const auto& p : pts) {
        if (std::abs(p.dF_dr) > best) {
            best = std::abs(p.dF_dr);
            best_m = p.m;
        }
    }
    EXPECT_NEAR(best_m, optimal_m(0.001), 1.0);
}

// ---------------------------------------------------------------------------
// Records and output files

TEST(RunRecordTest, UnknownScenarioListsValidNames) {
    try {
        run_scenario("nope", Config{}, 1);
        FAIL() << "expected an exception";
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        for (const auto& n : scenario_names()) {
            EXPECT_NE(msg.find(n), std::string::npos) << n;
        }
    }
}

TEST(RunRecordTest, RbCurveWritesOneCsvOneJsonOneSvg) {
    Config c = Config{};
    c.rb_k = 4;
    const RunRecord r = run_scenario("rb-curve", c, 7);
    const fs::path dir = fresh_dir("rbcurve");
    const auto written = write_outputs(r, dir);
    int csv = 0;
    int json = 0;
    int svg = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        csv += ext == ".csv";
        json += ext == ".json";
        svg += ext == ".svg";
    }
    EXPECT_EQ(csv, 1);
    EXPECT_EQ(json, 1);
    EXPECT_EQ(svg, 1);
    EXPECT_EQ(written.size(), 3u);
    const std::string curve = slurp(dir / "curve.csv");
    EXPECT_EQ(curve.rfind("m,seq_index,fidelity\n", 0), 0u);
    const auto record = Json::parse(slurp(dir / "record.json"));
    for (const char* key : {"A", "B", "p", "r", "residual", "converged"}) {
        EXPECT_TRUE(record["results"]["fit"].contains(key)) << key;
    }
    EXPECT_TRUE(record["wall_clock_seconds"].is_null());
    EXPECT_EQ(record["seed"].get<std::uint64_t>(), 7u);
    EXPECT_EQ(record["config"]["rb.k"].get<int>(), 4);
    fs::remove_all(dir);
}

TEST(RunRecordTest, SameSeedGivesByteIdenticalFiles) {
    Config c = Config{};
    c.rb_k = 6;
    const fs::path a = fresh_dir("det_a");
    const fs::path b = fresh_dir("det_b");
    write_outputs(run_scenario("rb-curve", c, 11), a);
    write_outputs(run_scenario("rb-curve", c, 11, 3), b);
    for (const auto& entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
    }
    const RunRecord other = run_scenario("rb-curve", c, 12);
    EXPECT_NE(other.artifacts.at("curve.csv"), slurp(a / "curve.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(RunRecordTest, CrosstalkMapSvgShowsLegendBands) {
    const RunRecord r = run_scenario("crosstalk-map", small_crosstalk_config(), 3);
    const std::string& svg = r.artifacts.at("map.svg");
    EXPECT_NE(svg.find("0.0005"), std::string::npos);
    EXPECT_NE(svg.find("0.01"), std::string::npos);
    EXPECT_EQ(r.artifacts.at("map.csv").rfind("delta_GHz,tgate_ns,seq_fidelity,inferred_error\n", 0), 0u);
}

TEST(RunRecordTest, TraceCsvHasOneColumnPerParameter) {
    OptimizationTrace t;
    t.evaluations.push_back({{1.0, 2.0, 3.0}, 0.5, 0.5});
    t.evaluations.push_back({{1.5, 2.0, 3.0}, 0.7, 0.5});
    const std::string csv = trace_csv(t);
    EXPECT_EQ(csv, "eval_index,cost,best_cost,param_1,param_2,param_3\n0,0.5,0.5,1,2,3\n1,0.7,0.5,1.5,2,3\n");
}

TEST(RunRecordTest, SensitivityRecordIsComplete) {
    const RunRecord r = run_scenario("sensitivity", Config{}, 1);
    ASSERT_EQ(r.results["peaks"].size(), 2u);
    EXPECT_NEAR(r.results["peaks"][0]["optimal_m"].get<double>(), 499.5, 0.5);
    EXPECT_EQ(r.artifacts.count("sensitivity.csv"), 1u);
    EXPECT_EQ(r.artifacts.count("sensitivity.svg"), 1u);
}

// ---------------------------------------------------------------------------
// IO helpers

TEST(Io, NumbersRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 2.5e-17, -123456.789, 0.998}) {
        EXPECT_EQ(std::stod(fmt_num(v)), v);
    }
    EXPECT_EQ(fmt_num(0.5), "0.5");
    EXPECT_EQ(fmt_num(std::nan("")), "nan");
}

TEST(Io, AtomicWriteReplacesAndLeavesNoTemporary) {
    const fs::path dir = fresh_dir("atomic");
    write_file_atomic(dir / "a.txt", "first");
    write_file_atomic(dir / "a.txt", "second");
    EXPECT_EQ(slurp(dir / "a.txt"), "second");
    int files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) {
        ++files;
    }
    EXPECT_EQ(files, 1);
    fs::remove_all(dir);
}

TEST(Io, MissingDirectoryIsAnErrorAndWritesNothing) {
    const fs::path dir = fs::temp_directory_path() / "orbitlab_scenarios_test_missing";
    fs::remove_all(dir);
    RunRecord r;
    r.scenario = "sensitivity";
    r.artifacts["x.csv"] = "a\n";
    EXPECT_THROW(write_outputs(r, dir), std::runtime_error);
    EXPECT_THROW(write_file_atomic(dir / "x.csv", "a"), std::runtime_error);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Io, WaveformCsvListsTimeAndValue) {
    const Waveform w{0.5, {1.0, -0.25, 0.0}};
    EXPECT_EQ(waveform_csv(w), "time_ns,value\n0,1\n0.5,-0.25\n1,0\n");
}
