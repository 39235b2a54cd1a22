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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

struct NelderMeadConfig {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    /// Initial simplex offset per dimension, in parameter units. Also the
    /// unit of the internal normalized coordinates. Empty means all ones.
    std::vector<double> initial_step;
    /// Simplex spread in normalized coordinates (max-norm from best vertex).
    double x_tolerance = 1e-10;
    /// Spread of vertex costs (max - min).
    double f_tolerance = 1e-14;
    int max_evaluations = 2000;

    void validate(std::size_t dim) const {
        for (double c : {reflection, expansion, contraction, shrink}) {
            if (!(c > 0.0)) {
                throw std::invalid_argument("Nelder-Mead coefficients must be positive");
            }
        }
        if (max_evaluations < static_cast<int>(dim) + 1) {
            throw std::invalid_argument("max_evaluations must be at least dim + 1");
        }
        if (!initial_step.empty() && initial_step.size() != dim) {
            throw std::invalid_argument("initial_step has " + std::to_string(initial_step.size()) +
                                        " entries, expected " + std::to_string(dim));
        }
        for (double s : initial_step) {
            if (!(s != 0.0) || !std::isfinite(s)) {
                throw std::invalid_argument("initial_step entries must be finite and nonzero");
            }
        }
    }
};

struct TraceEntry {
    std::vector<double> params;
    double cost;
    double best_cost;
};

struct OptimizationTrace {
    std::vector<TraceEntry> evaluations;
    std::vector<double> best_params;
    double best_cost = std::numeric_limits<double>::infinity();
    int evaluation_count = 0;
    bool converged = false;
};

using CostFunction = std::function<double(std::span<const double>)>;

/// Downhill simplex minimization. Non-finite costs rank as +infinity (worst)
/// and are recorded as returned. Vertex ordering depends only on cost order
/// with ties kept in insertion order, so the run is deterministic for a
/// deterministic cost.
inline OptimizationTrace nelder_mead(const CostFunction& cost, std::vector<double> x0,
                                     const NelderMeadConfig& config = {}) {
    const std::size_t n = x0.size();
    if (n == 0) {
        throw std::invalid_argument("nelder_mead: empty parameter vector");
    }
    config.validate(n);
    std::vector<double> step = config.initial_step.empty() ? std::vector<double>(n, 1.0) : config.initial_step;

    OptimizationTrace trace;
    auto to_params = [&](const std::vector<double>& z) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = x0[i] + step[i] * z[i];
        }
        return x;
    };
    auto evaluate = [&](const std::vector<double>& z) {
        const auto x = to_params(z);
        const double raw = cost(x);
        const double ranked = std::isfinite(raw) ? raw : std::numeric_limits<double>::infinity();
        if (ranked < trace.best_cost) {
            trace.best_cost = ranked;
            trace.best_params = x;
        }
        ++trace.evaluation_count;
        trace.evaluations.push_back({x, raw, trace.best_cost});
        return ranked;
    };
    auto budget_left = [&] { return trace.evaluation_count < config.max_evaluations; };

    const double first = evaluate(std::vector<double>(n, 0.0));
    if (!std::isfinite(first)) {
        throw std::invalid_argument("nelder_mead: cost is not finite at the starting point");
    }
    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(n, 0.0));
    std::vector<double> f(n + 1);
    f[0] = first;
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] = 1.0;
        f[i + 1] = evaluate(simplex[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    auto affine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        // a + t (b - a)
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = a[i] + t * (b[i] - a[i]);
        }
        return out;
    };

    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        {
            std::vector<std::vector<double>> s2;
            std::vector<double> f2;
            for (auto k : order) {
                s2.push_back(simplex[k]);
                f2.push_back(f[k]);
            }
            simplex = std::move(s2);
            f = std::move(f2);
        }
        double x_spread = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                x_spread = std::max(x_spread, std::abs(simplex[k][i] - simplex[0][i]));
            }
        }
        const double f_spread = f[n] - f[0];
        if (f_spread <= config.f_tolerance && x_spread <= config.x_tolerance) {
            trace.converged = true;
            break;
        }
        if (!budget_left()) {
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += simplex[k][i] / static_cast<double>(n);
            }
        }
        const auto xr = affine(centroid, simplex[n], -config.reflection);
        const double fr = evaluate(xr);

        if (fr < f[0]) {
            if (!budget_left()) {
                simplex[n] = xr;
                f[n] = fr;
                continue;
            }
            const auto xe = affine(centroid, xr, config.expansion);
            const double fe = evaluate(xe);
            if (fe < fr) {
                simplex[n] = xe;
                f[n] = fe;
            } else {
                simplex[n] = xr;
                f[n] = fr;
            }
            continue;
        }
        if (fr < f[n - 1]) {
            simplex[n] = xr;
            f[n] = fr;
            continue;
        }
        if (!budget_left()) {
            break;
        }
        bool accepted = false;
        if (fr < f[n]) {
            const auto xc = affine(centroid, xr, config.contraction);
            const double fc = evaluate(xc);
            if (fc <= fr) {
                simplex[n] = xc;
                f[n] = fc;
                accepted = true;
            }
        } else {
            const auto xcc = affine(centroid, simplex[n], config.contraction);
            const double fcc = evaluate(xcc);
            if (fcc < f[n]) {
                simplex[n] = xcc;
                f[n] = fcc;
                accepted = true;
            }
        }
        if (accepted) {
            continue;
        }
        for (std::size_t k = 1; k <= n && budget_left(); ++k) {
            simplex[k] = affine(simplex[0], simplex[k], config.shrink);
            f[k] = evaluate(simplex[k]);
        }
    }
    return trace;
}

}  // namespace orbitlab
