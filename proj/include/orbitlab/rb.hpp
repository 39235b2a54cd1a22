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
#include "orbitlab/measurement.hpp"
#include "orbitlab/parallel.hpp"
#include "orbitlab/seed.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

struct RbCurve {
    std::string mode = "reference";  // "reference", "interleaved:<gate>" or "simultaneous"
    int qubit_count = 1;
    int k = 0;
    std::vector<int> m_values;
    std::vector<std::vector<double>> fidelities;  // [m index][sequence index]

    double mean(std::size_t i) const {
        const auto& f = fidelities.at(i);
        return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    }

    /// Standard error of the per-m mean over sequences.
    double standard_error(std::size_t i) const {
        const auto& f = fidelities.at(i);
        if (f.size() < 2) {
            return 0.0;
        }
        const double mu = mean(i);
        double ss = 0.0;
        for (double v : f) {
            ss += (v - mu) * (v - mu);
        }
        return std::sqrt(ss / static_cast<double>(f.size() - 1) / static_cast<double>(f.size()));
    }

    std::vector<double> means() const {
        std::vector<double> out(m_values.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = mean(i);
        }
        return out;
    }
};

struct RbRunOptions {
    int k = 20;
    int repetitions = 900;  // 0 = exact expectation
    std::optional<InterleavedGate> interleaved;
    int parallel = 1;
};

/// Samples k sequences per m, simulates them on the backend and measures.
/// Sequence, shot and backend seeds are derived from (seed, m index,
/// sequence index), so the result is independent of the thread count.
template <RbBackend Backend>
RbCurve run_rb_curve(const Backend& backend, const std::vector<int>& m_values, const RbRunOptions& options,
                     std::uint64_t seed) {
    if (m_values.empty()) {
        throw std::invalid_argument("run_rb_curve: m_values must not be empty");
    }
    if (!std::is_sorted(m_values.begin(), m_values.end()) ||
        std::adjacent_find(m_values.begin(), m_values.end()) != m_values.end()) {
        throw std::invalid_argument("run_rb_curve: m_values must be strictly ascending");
    }
    if (m_values.front() < 1) {
        throw std::invalid_argument("run_rb_curve: m must be >= 1");
    }
    if (options.k < 1) {
        throw std::invalid_argument("run_rb_curve: k must be >= 1");
    }
    if (options.repetitions < 0) {
        throw std::invalid_argument("run_rb_curve: repetitions must be >= 0");
    }
    RbCurve curve;
    curve.qubit_count = backend.qubit_count();
    curve.k = options.k;
    curve.m_values = m_values;
    curve.mode = options.interleaved ? "interleaved:" + options.interleaved->label : "reference";
    const std::size_t k = static_cast<std::size_t>(options.k);
    std::vector<double> flat(m_values.size() * k);
    parallel_for(flat.size(), options.parallel, [&](std::size_t idx) {
        const std::size_t mi = idx / k;
        const std::size_t si = idx % k;
        const RbSequence s = sample_sequence(m_values[mi], curve.qubit_count, options.interleaved,
                                             derive_seed(seed, {tag(Stream::sequences), mi, si}));
        const double p = backend.ground_probability(s, derive_seed(seed, {tag(Stream::aggressor), mi, si}));
        flat[idx] = sample_probability(p, options.repetitions, derive_seed(seed, {tag(Stream::shots), mi, si}));
    });
    curve.fidelities.resize(m_values.size());
    for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
        curve.fidelities[mi].assign(flat.begin() + static_cast<std::ptrdiff_t>(mi * k),
                                    flat.begin() + static_cast<std::ptrdiff_t>((mi + 1) * k));
    }
    return curve;
}

struct DecayFit {
    double A = 0.0;
    double B = 0.0;
    double p = 1.0;
    double r = 0.0;
    int qubit_count = 1;
    double residual = 0.0;  // Euclidean norm of mean-fidelity residuals
    bool converged = false;
    int iterations = 0;
};

/// Error per Clifford for decay scale p on n qubits: (1 - p)(d - 1)/d.
inline double error_from_decay(double p, int qubit_count) {
    const double d = static_cast<double>(1 << qubit_count);
    return (1.0 - p) * (d - 1.0) / d;
}

inline double decay_from_error(double r, int qubit_count) {
    const double d = static_cast<double>(1 << qubit_count);
    return 1.0 - r * d / (d - 1.0);
}

/// Unweighted Levenberg-Marquardt fit of F(m) = A p^m + B to (m, F) pairs,
/// with p kept in [0, 1] and A + B kept at most 1.
inline DecayFit fit_decay_points(const std::vector<int>& m_values, const std::vector<double>& f, int qubit_count,
                                 int max_iterations = 500) {
    if (m_values.size() != f.size()) {
        throw std::invalid_argument("fit_decay: m and F sizes differ");
    }
    std::vector<int> distinct = m_values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) {
        throw std::invalid_argument("fit_decay: need at least 3 distinct m values");
    }
    const std::size_t n = f.size();
    DecayFit fit;
    fit.qubit_count = qubit_count;

    // Initial guess: floor at the smallest observation, amplitude spanning
    // the data, decay from the log-slope of the points above the floor.
    const double b0 = *std::min_element(f.begin(), f.end());
    const double a0 = *std::max_element(f.begin(), f.end()) - b0;
    double p0 = 0.99;
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = f[i] - b0;
            if (y > 1e-3 * std::max(a0, 1e-12)) {
                const double x = m_values[i];
                const double ly = std::log(y);
                sx += x;
                sy += ly;
                sxx += x * x;
                sxy += x * ly;
                ++cnt;
            }
        }
        if (cnt >= 2 && sxx * cnt - sx * sx > 0.0) {
            const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
            p0 = std::clamp(std::exp(slope), 1e-6, 1.0);
        }
    }
    if (a0 <= 0.0) {
        // Flat data: no decay is observable.
        fit.A = 0.0;
        fit.B = b0;
        fit.p = 1.0;
        fit.r = 0.0;
        fit.converged = true;
        return fit;
    }

    Eigen::Vector3d x(a0, p0, b0);
    auto project = [](Eigen::Vector3d& v) {
        v(1) = std::clamp(v(1), 0.0, 1.0);
        if (v(0) + v(2) > 1.0) {
            v(2) = 1.0 - v(0);
        }
    };
    project(x);
    auto residuals = [&](const Eigen::Vector3d& v) {
        Eigen::VectorXd r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r(static_cast<Eigen::Index>(i)) = v(0) * std::pow(v(1), m_values[i]) + v(2) - f[i];
        }
        return r;
    };
    Eigen::VectorXd res = residuals(x);
    double cost = res.squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < max_iterations; ++it) {
        Eigen::MatrixXd jac(n, 3);
        for (std::size_t i = 0; i < n; ++i) {
            const int m = m_values[i];
            const double pm = std::pow(x(1), m);
            const auto row = static_cast<Eigen::Index>(i);
            jac(row, 0) = pm;
            jac(row, 1) = m == 0 ? 0.0 : x(0) * m * std::pow(x(1), m - 1);
            jac(row, 2) = 1.0;
        }
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d grad = jac.transpose() * res;
        bool improved = false;
        while (lambda < 1e12) {
            Eigen::Matrix3d lhs = jtj;
            lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            Eigen::Vector3d step = lhs.ldlt().solve(-grad);
            Eigen::Vector3d trial = x + step;
            project(trial);
            const Eigen::VectorXd tres = residuals(trial);
            const double tcost = tres.squaredNorm();
            if (tcost <= cost) {
                const double change = (trial - x).cwiseAbs().maxCoeff();
                const double drop = cost - tcost;
                x = trial;
                res = tres;
                cost = tcost;
                lambda = std::max(lambda * 0.3, 1e-15);
                improved = true;
                if (change < 1e-14 || drop <= 1e-30 + 1e-16 * cost) {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            // No downhill step exists at any damping: a (constrained) minimum.
            converged = true;
        }
        if (converged) {
            break;
        }
    }
    fit.A = x(0);
    fit.p = x(1);
    fit.B = x(2);
    fit.r = error_from_decay(fit.p, qubit_count);
    fit.residual = std::sqrt(cost);
    fit.converged = converged;
    fit.iterations = it;
    return fit;
}

/// Fits the per-m mean fidelities of a curve.
inline DecayFit fit_decay(const RbCurve& curve) {
    return fit_decay_points(curve.m_values, curve.means(), curve.qubit_count);
}

struct GateError {
    double r = 0.0;
    bool negative = false;  // p_gate > p_ref: inconsistent data, reported as is
};

/// Interleaved gate error (1 - p_gate/p_ref)(d - 1)/d.
inline GateError gate_error(double p_gate, double p_ref, int qubit_count) {
    if (!(p_ref > 0.0) || p_ref > 1.0) {
        throw std::invalid_argument("gate_error: p_ref must lie in (0, 1], got " + std::to_string(p_ref));
    }
    const double d = static_cast<double>(1 << qubit_count);
    GateError e;
    e.r = (1.0 - p_gate / p_ref) * (d - 1.0) / d;
    e.negative = e.r < 0.0;
    return e;
}

/// Length of maximal sensitivity to the error per Clifford, -1/ln(1 - 2r).
inline double optimal_m(double r) {
    if (!(r > 0.0 && r < 0.5)) {
        throw std::invalid_argument("optimal_m: r must lie in (0, 0.5), got " + std::to_string(r));
    }
    return -1.0 / std::log1p(-2.0 * r);
}

struct Sensitivity {
    double dF_dr_at_m = 0.0;
    double dF_dr_at_optimal = 0.0;
    double fractional = 0.0;  // r * dF/dr at the optimal m
    double optimal_m = 0.0;
};

/// Slope of F = A (1 - 2r)^m + B with respect to r, at m and at the optimal m.
inline Sensitivity sensitivity(double r, double A, double m) {
    if (!(r > 0.0 && r < 0.5)) {
        throw std::invalid_argument("sensitivity: r must lie in (0, 0.5), got " + std::to_string(r));
    }
    if (!(A > 0.0)) {
        throw std::invalid_argument("sensitivity: A must be positive");
    }
    if (!(m >= 0.0)) {
        throw std::invalid_argument("sensitivity: m must be non-negative");
    }
    const double q = 1.0 - 2.0 * r;
    Sensitivity s;
    s.optimal_m = optimal_m(r);
    s.dF_dr_at_m = -2.0 * A * m * std::pow(q, m - 1.0);
    s.dF_dr_at_optimal = 2.0 * A / (std::exp(1.0) * q * std::log(q));
    s.fractional = r * s.dF_dr_at_optimal;
    return s;
}

struct InferredError {
    double r = 0.0;
    bool clamped = false;  // observation outside (B, A + B]
};

/// Inverts F = A p^m + B for p at a single length and converts to r.
inline InferredError infer_error_at_m(double f_observed, const DecayFit& fit, int m) {
    if (m < 1) {
        throw std::invalid_argument("infer_error_at_m: m must be >= 1");
    }
    if (!(fit.A > 0.0)) {
        throw std::invalid_argument("infer_error_at_m: fit amplitude must be positive");
    }
    InferredError out;
    const double x = (f_observed - fit.B) / fit.A;
    double p = 0.0;
    if (x <= 0.0) {
        out.clamped = true;
        p = 0.0;
    } else if (x > 1.0) {
        out.clamped = true;
        p = 1.0;
    } else {
        p = std::pow(x, 1.0 / m);
    }
    out.r = error_from_decay(p, fit.qubit_count);
    return out;
}

/// Standard error of an inferred error given the standard error of the
/// observed fidelity, linearized at the inferred point: sigma_F / |dF/dr|
/// with dF/dr = A m p^(m-1) dp/dr. Infinite when the observation sits at or
/// below the decay floor, where F no longer resolves r.
inline double inferred_error_sigma(double f_standard_error, const DecayFit& fit, int m, const InferredError& e) {
    const double d = static_cast<double>(1 << fit.qubit_count);
    const double p = decay_from_error(e.r, fit.qubit_count);
    if (!(p > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    const double slope = fit.A * m * std::pow(p, m - 1) * d / (d - 1.0);
    return slope > 0.0 ? f_standard_error / slope : std::numeric_limits<double>::infinity();
}

/// Expected two-qubit reference error from 8.25 single-qubit gates and 1.5
/// CZ gates per two-qubit Clifford.
inline double expected_reference_error(double r_single, double r_cz) {
    if (r_single < 0.0 || r_cz < 0.0) {
        throw std::invalid_argument("expected_reference_error: inputs must be non-negative");
    }
    return 8.25 * r_single + 1.5 * r_cz;
}

struct OrbitCost {
    double cost = 0.0;  // 1 - mean fidelity
    double mean = 0.0;
    double standard_error = 0.0;
};

/// ORBIT figure of merit: k fresh random sequences at one fixed length.
template <RbBackend Backend>
OrbitCost orbit_metric(const Backend& backend, int m, const RbRunOptions& options, std::uint64_t seed) {
    if (m < 1) {
        throw std::invalid_argument("orbit_metric: m must be >= 1");
    }
    const RbCurve c = run_rb_curve(backend, {m}, options, seed);
    OrbitCost out;
    out.mean = c.mean(0);
    out.standard_error = c.standard_error(0);
    out.cost = 1.0 - out.mean;
    return out;
}

}  // namespace orbitlab
