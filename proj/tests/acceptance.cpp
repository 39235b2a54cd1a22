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


// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance and
// budget is pinned below. The exit status is nonzero when a criterion fails,
// except for failures listed in kKnownFailures, which are still printed as
// FAIL and annotated with the reason they cannot pass.

#include "orbitlab/backends.hpp"
#include "orbitlab/clifford.hpp"
#include "orbitlab/config.hpp"
#include "orbitlab/cz.hpp"
#include "orbitlab/device.hpp"
#include "orbitlab/io.hpp"
#include "orbitlab/line_response.hpp"
#include "orbitlab/linalg.hpp"
#include "orbitlab/pulse.hpp"
#include "orbitlab/rb.hpp"
#include "orbitlab/run.hpp"
#include "orbitlab/scenarios.hpp"
#include "orbitlab/seed.hpp"
#include "orbitlab/timeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace orbitlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

/// Criteria that are implemented as stated but cannot pass, with the reason.
const std::map<int, std::string> kKnownFailures = {
    {5, "r dF/dr at m' is exactly (-A/e) * -2r/((1-2r) ln(1-2r)), 1.0102 (-A/e) at r = 1e-2, "
        "so S leaves the 1% band near the top of the range for any A"},
};

struct Context {
    int parallel = 1;
    std::string cli;  // path of the orbitlab executable, for the CLI determinism check
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double relative(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

// ---------------------------------------------------------------------------
// 1. Clifford groups and recovery

Outcome clifford_groups() {
    Outcome o;
    const std::size_t n1 = enumerate_group(1).size();
    const std::size_t n2 = enumerate_group(2).size();
    double worst = 0.0;
    for (int n : {1, 2}) {
        for (int m : {1, 10, 100}) {
            for (std::uint64_t s = 0; s < 100; ++s) {
                const RbSequence seq =
                    sample_sequence(m, n, std::nullopt,
                                    derive_seed(0xC1F, {tag(Stream::sequences), static_cast<std::uint64_t>(n),
                                                        static_cast<std::uint64_t>(m), s}));
                const int d = 1 << n;
                worst = std::max(worst, phase_aligned_distance(ideal_sequence_unitary(seq), MatX::Identity(d, d)));
            }
        }
    }
    o.pass = n1 == 24 && n2 == 11520 && worst <= 1e-10;
    o.detail = "|C1| = " + std::to_string(n1) + ", |C2| = " + std::to_string(n2) +
               ", worst recovery distance " + fmt("%.2e", worst) + " (<= 1e-10) over 600 sequences";
    return o;
}

// ---------------------------------------------------------------------------
// 2. Average CZ count

Outcome cz_count() {
    long total = 0;
    for (const auto& e : enumerate_group(2)) {
        total += e.cz_count;
    }
    Outcome o;
    // Exact: 1.5 * 11520 = 17280.
    o.pass = 2 * total == 3 * 11520L;
    o.detail = "sum of CZ counts " + std::to_string(total) + " over 11520 elements, average " +
               fmt("%.17g", static_cast<double>(total) / 11520.0) + " (== 1.5)";
    return o;
}

// ---------------------------------------------------------------------------
// 3. Decay fit on an analytic depolarizing channel

std::vector<int> lengths_to(double m_max, int points) {
    std::vector<int> ms{1};
    for (int j = 1; j <= points; ++j) {
        const int m = static_cast<int>(std::lround(m_max * j / points));
        if (m > ms.back()) {
            ms.push_back(m);
        }
    }
    return ms;
}

Outcome decay_fit(const Context& ctx) {
    Outcome o;
    o.pass = true;
    for (double p : {0.99, 0.998}) {
        const double m_opt = -1.0 / std::log(p);
        const auto ms = lengths_to(3.0 * m_opt, 12);
        const DepolarizingBackend backend{1, p, 1.0, SpamParams{}};
        RbRunOptions opt;
        opt.k = 40;
        opt.repetitions = 900;
        opt.parallel = ctx.parallel;
        int within = 0;
        double worst = 0.0;
        for (std::uint64_t t = 0; t < 100; ++t) {
            const DecayFit f = fit_decay(run_rb_curve(backend, ms, opt, derive_seed(3, {t})));
            const double err = std::abs(f.p - p);
            worst = std::max(worst, err);
            within += err <= 0.002;
        }
        o.pass = o.pass && within >= 95;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("p = ") + fmt("%g", p) + ": " +
                    std::to_string(within) + "/100 within 0.002 (worst " + fmt("%.4f", worst) + ", m <= " +
                    std::to_string(ms.back()) + ")";
    }
    return o;
}

// ---------------------------------------------------------------------------
// 4. Interleaved extraction

Outcome interleaved_extraction(const Context& ctx) {
    Outcome o;
    o.pass = true;
    const double r_ref = 0.0188;  // error per two-qubit Clifford of the reference channel
    const std::vector<int> ms{1, 4, 8, 12, 16, 24, 32, 48, 64, 96, 128};
    for (double r_true : {0.005, 0.02}) {
        const DepolarizingBackend ref{2, decay_from_error(r_ref, 2), 1.0, SpamParams{}};
        const DepolarizingBackend inter{2, decay_from_error(r_ref, 2), decay_from_error(r_true, 2), SpamParams{}};
        RbRunOptions opt;
        opt.k = 40;
        opt.repetitions = 900;
        opt.parallel = ctx.parallel;
        RbRunOptions opt_i = opt;
        opt_i.interleaved = interleaved_from_label("CZ", 2);
        int within = 0;
        for (std::uint64_t t = 0; t < 100; ++t) {
            const DecayFit fr = fit_decay(run_rb_curve(ref, ms, opt, derive_seed(4, {t, 0})));
            const DecayFit fi = fit_decay(run_rb_curve(inter, ms, opt_i, derive_seed(4, {t, 1})));
            within += relative(gate_error(fi.p, fr.p, 2).r, r_true) <= 0.25;
        }
        o.pass = o.pass && within >= 90;
        o.detail += "r = " + fmt("%g", r_true) + ": " + std::to_string(within) + "/100 within 25%; ";
    }
    auto from_errors = [](double ref, double in) {
        return gate_error(decay_from_error(in, 2), decay_from_error(ref, 2), 2).r;
    };
    const double a = from_errors(0.0188, 0.0254);
    const double b = from_errors(0.0361, 0.0511);
    o.pass = o.pass && std::abs(a - 0.0068) <= 0.0002 && std::abs(b - 0.0157) <= 0.0002;
    o.detail += "0.0188/0.0254 -> " + fmt("%.5f", a) + ", 0.0361/0.0511 -> " + fmt("%.5f", b);
    return o;
}

// ---------------------------------------------------------------------------
// 5. Sensitivity scaling

struct Peak {
    int m;
    double slope;
};

Peak numeric_peak(double r, double A) {
    const int m_max = static_cast<int>(10.0 * optimal_m(r));
    Peak best{0, 0.0};
    for (const auto& p : sensitivity_curves({r}, A, m_max, 1)) {
        if (std::abs(p.dF_dr) > best.slope) {
            best = {p.m, std::abs(p.dF_dr)};
        }
    }
    return best;
}

Outcome sensitivity_scaling() {
    Outcome o;
    const double A = 0.5;
    bool location = true;
    std::string loc;
    for (double r : {0.001, 0.0005}) {
        const Peak p = numeric_peak(r, A);
        const double m_opt = -1.0 / std::log(1.0 - 2.0 * r);
        location = location && relative(p.m, m_opt) <= 0.02;
        loc += "r = " + fmt("%g", r) + ": peak m " + std::to_string(p.m) + " vs m' " + fmt("%.1f", m_opt) + "; ";
    }
    const Peak a = numeric_peak(0.001, A);
    const Peak b = numeric_peak(0.0005, A);
    const double m_ratio = optimal_m(0.0005) / optimal_m(0.001);
    const double slope_ratio = b.slope / a.slope;
    const bool halving = relative(m_ratio, 2.0) <= 0.005 && relative(slope_ratio, 2.0) <= 0.005;
    double worst = 0.0;
    double worst_r = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double r = 1e-4 * std::pow(100.0, i / 40.0);
        const double s = sensitivity(r, A, optimal_m(r)).fractional;
        const double dev = relative(s, -A / std::exp(1.0));
        if (dev > worst) {
            worst = dev;
            worst_r = r;
        }
    }
    const bool flat = worst <= 0.01;
    o.pass = location && halving && flat;
    o.detail = loc + "halving r: m' x" + fmt("%.4f", m_ratio) + ", peak |dF/dr| x" + fmt("%.4f", slope_ratio) +
               "; S vs -A/e: worst " + fmt("%.3f", 100.0 * worst) + "% at r = " + fmt("%.2g", worst_r) +
               " (<= 1%)";
    return o;
}

// ---------------------------------------------------------------------------
// 6. Closed-loop X/2

Outcome closed_loop_x2(const Context& ctx) {
    const Config c;
    DeviceModel start = c.device;
    start.xy[0] = perturb_xy(start.xy[0], X2Perturbation{0.05, 0.002, 0.3});
    Outcome o;
    struct Mode {
        const char* name;
        int repetitions;
        int evaluations;
        double threshold;
        int needed;
    };
    o.pass = true;
    for (const Mode mode : {Mode{"exact", 0, 200, 0.001, 8}, Mode{"900 shots", 900, 300, 0.002, 7}}) {
        OrbitSettings s = detail::settings(c, c.x2_m, c.x2_k, mode.evaluations, c.x2_fresh_sequences, c.x2_verify_m,
                                           ctx.parallel);
        s.repetitions = mode.repetitions;
        int reached = 0;
        std::string errors;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const X2Result x = optimize_x2(start, s, seed, false);
            // Gate error of the tuned pulse, from exact-expectation interleaved RB.
            const GateVerification v =
                verify_gate(GateSetBackend(with_xy(start, x.trace.best_params), 1), "X/2", c.x2_verify_m, c.verify_k,
                            0, ctx.parallel, derive_seed(seed, {tag(Stream::verification)}));
            reached += x.trace.evaluation_count <= mode.evaluations && v.gate.r < mode.threshold;
            errors += (errors.empty() ? "" : " ") + fmt("%.5f", v.gate.r);
        }
        o.pass = o.pass && reached >= mode.needed;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string(mode.name) + ": " + std::to_string(reached) +
                    "/10 with r < " + fmt("%g", mode.threshold) + " [" + errors + "]";
    }
    return o;
}

// ---------------------------------------------------------------------------
// 7. Closed-loop CZ (exact-expectation mode)

Outcome closed_loop_cz(const Context& ctx) {
    Config c;
    c.repetitions = 0;
    const std::uint64_t seed = 1;
    const DeviceModel start = perturb_cz(c.device, c.cz_target_reference_error, seed);
    const OrbitSettings s =
        detail::settings(c, c.cz_m, c.cz_k, c.cz_max_evaluations, c.cz_fresh_sequences, c.cz_verify_m, ctx.parallel);
    const CzResult x = optimize_cz(start, s, seed, c.single_qubit_verify_m);
    const double ref_before = x.before.reference.r;
    const double ref_after = x.after.reference.r;
    const double improvement = 1.0 - ref_after / ref_before;
    const double cz_ratio = x.before.gate.r / x.after.gate.r;
    const double consistency = std::abs(ref_after - x.expected_after) / ref_after;
    Outcome o;
    o.pass = ref_before >= 0.03 && improvement >= 0.40 && x.after.gate.r > 0.0 && cz_ratio >= 2.0 &&
             consistency <= 0.15;
    o.detail = "r_ref " + fmt("%.4f", ref_before) + " -> " + fmt("%.4f", ref_after) + " (" +
               fmt("%.0f", 100.0 * improvement) + "% better, >= 40%); r_CZ " + fmt("%.4f", x.before.gate.r) + " -> " +
               fmt("%.4f", x.after.gate.r) + " (x" + fmt("%.2f", cz_ratio) + ", >= 2); r_SQ " +
               fmt("%.5f", x.r_single_after) + ", self-consistency " + fmt("%.1f", 100.0 * consistency) +
               "% (<= 15%); " + std::to_string(x.trace.evaluation_count) + " evaluations";
    return o;
}

// ---------------------------------------------------------------------------
// 8. Bleedthrough (exact-expectation mode, one fixed sequence set)

Outcome bleedthrough(const Context& ctx) {
    Config c;
    c.repetitions = 0;
    // One fixed sequence set: the cost difference between the injected and a
    // 25%-off pole set is below the scatter between fresh sets at m = 30.
    c.step_fresh_sequences = 0;
    const OrbitSettings s = detail::settings(c, c.step_m, c.step_k, c.step_max_evaluations, c.step_fresh_sequences,
                                             c.step_verify_m, ctx.parallel);
    const DeconvolutionResult x = optimize_deconvolution(c.device, s, 1);
    const double r_before = x.before.gate.r;
    const double r_after = x.after.gate.r;
    const double phi_before = max_abs(x.phase_before);
    const double phi_after = max_abs(x.phase_after);
    // Injected poles ordered fast first, like the tuned ones.
    auto injected = c.device.line.poles;
    std::sort(injected.begin(), injected.end(), [](const Pole& a, const Pole& b) { return a.rate > b.rate; });
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        worst = std::max(worst, relative(x.tuned[2 * i], injected[i].amplitude));
        worst = std::max(worst, relative(x.tuned[2 * i + 1], injected[i].rate));
    }
    Outcome o;
    o.pass = r_before > 0.0 && r_after <= r_before / 3.0 && phi_after <= phi_before / 5.0 && worst <= 0.20;
    o.detail = "step error " + fmt("%.5f", r_before) + " -> " + fmt("%.5f", r_after) + " (>= 3x); max|dphi| " +
               fmt("%.4f", phi_before) + " -> " + fmt("%.4f", phi_after) + " rad (>= 5x); poles (" +
               fmt("%.4f", x.tuned[0]) + ", " + fmt("%.4f", x.tuned[1]) + "), (" + fmt("%.4f", x.tuned[2]) + ", " +
               fmt("%.5f", x.tuned[3]) + ") worst " + fmt("%.1f", 100.0 * worst) + "% (<= 20%)";
    return o;
}

// ---------------------------------------------------------------------------
// 9. Crosstalk map structure

Outcome crosstalk_structure(const Context& ctx) {
    const Config c;
    const auto& ds = c.crosstalk_detunings_ghz;
    const auto& ts = c.crosstalk_gate_lengths_ns;
    const CrosstalkMap map = crosstalk_map(c.device, ds, ts, 35, 20, c.repetitions, c.crosstalk_reference_m,
                                           ctx.parallel, 9);
    const std::size_t nd = ds.size();
    const std::size_t nt = ts.size();
    auto cell = [&](std::size_t i, std::size_t j) -> const CrosstalkCell& { return map.cells[i * nt + j]; };
    // a is not larger than b within 2 combined standard deviations.
    auto not_above = [&](const CrosstalkCell& a, const CrosstalkCell& b) {
        const double sigma = std::hypot(a.added_error_sigma, b.added_error_sigma);
        return !(a.added_error > b.added_error + 2.0 * sigma);
    };
    auto nearest = [&](double d) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < nd; ++i) {
            if (std::abs(ds[i] - d) < std::abs(ds[best] - d)) {
                best = i;
            }
        }
        return best;
    };
    // Resonances in aggressor detuning from the victim's f10: f10 itself and f21.
    const std::size_t r10 = nearest(0.0);
    const std::size_t r21 = nearest(c.device.qubits[0].anharmonicity_ghz);
    const std::size_t lo = std::min(r10, r21);
    const std::size_t hi = std::max(r10, r21);
    int violations = 0;
    for (std::size_t j = 0; j < nt; ++j) {
        // Maxima: no cell of a row exceeds the larger resonant cell of that row.
        const CrosstalkCell& peak = cell(r10, j).added_error >= cell(r21, j).added_error ? cell(r10, j) : cell(r21, j);
        for (std::size_t i = 0; i < nd; ++i) {
            violations += !not_above(cell(i, j), peak);
        }
        // Monotone away from the resonances on both outer sides, and between
        // them toward the midpoint.
        for (std::size_t i = hi; i + 1 < nd; ++i) {
            violations += !not_above(cell(i + 1, j), cell(i, j));
        }
        for (std::size_t i = lo; i > 0; --i) {
            violations += !not_above(cell(i - 1, j), cell(i, j));
        }
        for (std::size_t i = lo + 1; i < hi; ++i) {
            const std::size_t from = (i - lo <= hi - i) ? i - 1 : i + 1;
            violations += !not_above(cell(i, j), cell(from, j));
        }
    }
    for (std::size_t i = 0; i < nd; ++i) {
        for (std::size_t j = 0; j + 1 < nt; ++j) {
            violations += !not_above(cell(i, j + 1), cell(i, j));
        }
    }
    // Both resonances are local maxima along detuning in every row (within
    // 2 sigma), and in the slowest row, where the aggressor spectrum is
    // narrowest, they are strictly the two largest cells.
    bool resonant_maxima = true;
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t r : {r10, r21}) {
            for (std::size_t nb : {r - 1, r + 1}) {
                if (nb < nd && nb != r10 && nb != r21) {
                    resonant_maxima = resonant_maxima && not_above(cell(nb, j), cell(r, j));
                }
            }
        }
    }
    const double slow_floor = std::min(cell(r10, nt - 1).added_error, cell(r21, nt - 1).added_error);
    for (std::size_t i = 0; i < nd; ++i) {
        if (i != r10 && i != r21) {
            resonant_maxima = resonant_maxima && cell(i, nt - 1).added_error < slow_floor;
        }
    }
    const double far_low = cell(0, nt - 1).added_error;
    const double far_high = cell(nd - 1, nt - 1).added_error;
    const double resonant_fast = cell(r10, 0).added_error;
    Outcome o;
    o.pass = resonant_maxima && violations == 0 && far_low < 0.0005 && far_high < 0.0005 && resonant_fast > 0.01;
    o.detail = "resonances at " + fmt("%g", ds[r10]) + " and " + fmt("%g", ds[r21]) + " GHz " +
               (resonant_maxima ? "are" : "are NOT") + " maxima; " + std::to_string(violations) +
               " monotonicity violations beyond 2 sigma; far corners " + fmt("%.5f", far_low) + ", " +
               fmt("%.5f", far_high) + " (< 0.0005); resonant-fast " + fmt("%.4f", resonant_fast) + " (> 0.01)";
    return o;
}

// ---------------------------------------------------------------------------
// 10. Step phase

Outcome step_phase() {
    const StepPulseParams step;  // 35 ns at -0.37 GHz
    const Waveform ideal = step.ideal_waveform(kDefaultDt);
    const double phase = std::abs(accumulated_phase(ideal, 0, ideal.samples.size()));
    Outcome o;
    o.pass = step.duration_ns == 35.0 && step.detuning_ghz == -0.37 &&
             std::abs(phase - 12.95 * kTwoPi) <= 0.01 * kTwoPi;
    o.detail = "phase " + fmt("%.6f", phase / kTwoPi) + " x 2pi (12.95 +- 0.01)";
    return o;
}

// ---------------------------------------------------------------------------
// 11. Determinism and unitarity

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

/// Reduced budgets so that every scenario runs in seconds.
Config small_config() {
    Config c;
    c.rb_k = 6;
    c.landscape_m_values = {1, 20, 50};
    c.landscape_points = 3;
    c.landscape_k = 4;
    c.x2_k = 10;
    c.x2_max_evaluations = 12;
    c.x2_verify_m = {1, 20, 50};
    c.verify_k = 4;
    c.cz_k = 4;
    c.cz_max_evaluations = 12;
    c.cz_verify_m = {1, 5, 10};
    c.single_qubit_verify_m = {1, 20, 50};
    c.step_k = 2;
    c.step_max_evaluations = 8;
    c.step_verify_m = {1, 5, 10};
    c.crosstalk_detunings_ghz = {-0.22, 0.0};
    c.crosstalk_gate_lengths_ns = {4.0, 40.0};
    c.crosstalk_k = 2;
    c.crosstalk_reference_m = {1, 20, 50};
    c.sensitivity_m_max = 500;
    return c;
}

bool same_directories(const fs::path& a, const fs::path& b, std::string& why) {
    std::vector<std::string> na;
    std::vector<std::string> nb;
    for (const auto& e : fs::directory_iterator(a)) {
        na.push_back(e.path().filename().string());
    }
    for (const auto& e : fs::directory_iterator(b)) {
        nb.push_back(e.path().filename().string());
    }
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    if (na != nb || na.empty()) {
        why = "file lists differ";
        return false;
    }
    for (const auto& n : na) {
        if (slurp(a / n) != slurp(b / n)) {
            why = n + " differs";
            return false;
        }
    }
    return true;
}

double worst_unitarity() {
    double worst = 0.0;
    auto track = [&](const auto& u) { worst = std::max(worst, unitarity_deviation(u)); };
    for (int n : {1, 2}) {
        for (const auto& e : enumerate_group(n)) {
            track(e.unitary);
        }
    }
    const DeviceModel d = default_device();
    std::vector<XYPulseParams> pulses = {d.xy[0], d.xy[1], perturb_xy(d.xy[0], X2Perturbation{})};
    pulses.push_back(perturb_xy(d.xy[0], X2Perturbation{-0.3, -0.01, -1.0}));
    for (const auto& p : pulses) {
        for (GateKind g : kSingleQubitGates) {
            track(xy_gate_unitary(g, p, d.qubits[0], d.dt_ns));
        }
    }
    track(cz_unitary(d.cz, d.qubits[0], d.qubits[1], d.dt_ns));
    for (std::uint64_t s = 0; s < 5; ++s) {
        const DeviceModel p = perturb_cz(d, 0.036 + 0.02 * static_cast<double>(s), s);
        track(cz_unitary(p.cz, p.qubits[0], p.qubits[1], p.dt_ns));
    }
    // Step propagator, assembled column by column from basis-state evolutions.
    const LineResponse corr{{{0.01, 0.05}}, LineResponse::Role::kCorrection};
    for (const LineResponse* c : {static_cast<const LineResponse*>(nullptr), &corr}) {
        Mat3 u;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e(k) = 1.0;
            u.col(k) = apply_step_detune(e, d.step, d.line, c, d.qubits[0], d.dt_ns);
        }
        track(u);
    }
    return worst;
}

Outcome determinism_and_unitarity(const Context& ctx) {
    const Config c = small_config();
    const fs::path root = fs::temp_directory_path() / "orbitlab_acceptance_determinism";
    fs::remove_all(root);
    bool same = true;
    std::string why;
    for (const auto& name : scenario_names()) {
        const fs::path a = root / (name + "_a");
        const fs::path b = root / (name + "_b");
        fs::create_directories(a);
        fs::create_directories(b);
        write_outputs(run_scenario(name, c, 2026, 1), a);
        write_outputs(run_scenario(name, c, 2026, std::max(2, ctx.parallel)), b);
        std::string w;
        if (!same_directories(a, b, w)) {
            same = false;
            why += name + ": " + w + "; ";
        }
    }
    std::string cli_note = "CLI not checked";
    if (!ctx.cli.empty()) {
        const fs::path cfg = root / "small.cfg";
        write_file_atomic(cfg, emit_config(c));
        bool cli_same = true;
        for (const char* name : {"rb-curve", "sensitivity"}) {
            for (const char* run : {"a", "b"}) {
                const fs::path out = root / (std::string("cli_") + name + "_" + run);
                const std::string cmd = "\"" + ctx.cli + "\" " + name + " --config \"" + cfg.string() +
                                        "\" --seed 7 --out \"" + out.string() + "\" > /dev/null 2>&1";
                cli_same = cli_same && std::system(cmd.c_str()) == 0;
            }
            std::string w;
            cli_same = cli_same && same_directories(root / (std::string("cli_") + name + "_a"),
                                                    root / (std::string("cli_") + name + "_b"), w);
        }
        same = same && cli_same;
        cli_note = cli_same ? "CLI reruns identical" : "CLI reruns DIFFER";
    }
    fs::remove_all(root);
    const double worst = worst_unitarity();
    Outcome o;
    o.pass = same && worst <= 1e-9;
    o.detail = std::string(same ? "all 7 scenarios byte-identical across reruns (1 and " +
                                      std::to_string(std::max(2, ctx.parallel)) + " threads)"
                                : "NOT identical: " + why) +
               "; " + cli_note + "; max |U^dag U - I| " + fmt("%.2e", worst) + " (<= 1e-9)";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbitlab acceptance suite"};
    Context ctx;
    ctx.parallel = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<int> only;
    bool strict = false;
    app.add_option("--only", only, "Run only these criteria (comma separated)")
        ->delimiter(',')
        ->check(CLI::Range(1, 11));
    app.add_option("--parallel", ctx.parallel, "Worker threads")->check(CLI::Range(1, 1024));
    app.add_option("--cli", ctx.cli, "Path of the orbitlab executable for the CLI rerun check");
    app.add_flag("--strict", strict, "Also fail on known failures");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "Clifford groups and recovery", 60.0, clifford_groups},
        {2, "average CZ count", 60.0, cz_count},
        {3, "decay fit on depolarizing channel", 120.0, [&] { return decay_fit(ctx); }},
        {4, "interleaved extraction", 120.0, [&] { return interleaved_extraction(ctx); }},
        {5, "sensitivity scaling", 1.0, sensitivity_scaling},
        {6, "closed-loop X/2", 600.0, [&] { return closed_loop_x2(ctx); }},
        {7, "closed-loop CZ", 1800.0, [&] { return closed_loop_cz(ctx); }},
        {8, "bleedthrough deconvolution", 900.0, [&] { return bleedthrough(ctx); }},
        {9, "crosstalk map structure", 1200.0, [&] { return crosstalk_structure(ctx); }},
        {10, "step phase", 1.0, step_phase},
        {11, "determinism and unitarity", 600.0, [&] { return determinism_and_unitarity(ctx); }},
    };
    int unexpected = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = seconds < c.budget_seconds;
        const bool pass = o.pass && in_time;
        const auto known = kKnownFailures.find(c.id);
        std::string line = std::string(pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " (" +
                           c.name + "): " + o.detail + "; " + fmt("%.1f", seconds) + " s (< " +
                           fmt("%g", c.budget_seconds) + " s)";
        if (!pass && known != kKnownFailures.end()) {
            line += " [known failure: " + known->second + "]";
        }
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        if (!pass && (strict || known == kKnownFailures.end())) {
            ++unexpected;
        }
    }
    return unexpected == 0 ? 0 : 1;
}
