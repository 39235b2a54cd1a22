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


#include "orbitlab/measurement.hpp"
#include "orbitlab/nelder_mead.hpp"
#include "orbitlab/seed.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

using namespace orbitlab;

namespace {

double quadratic(std::span<const double> x) {
    const double a = x[0] - 1.0;
    const double b = x[1] + 2.0;
    const double c = x[2] - 0.5;
    return a * a + 10.0 * b * b + 3.0 * c * c + a * b;
}

double rosenbrock(std::span<const double> x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
}

}  // namespace

TEST(NelderMead, MinimizesQuadratic) {
    const OptimizationTrace t = nelder_mead(quadratic, {0.0, 0.0, 0.0});
    ASSERT_EQ(t.best_params.size(), 3u);
    EXPECT_NEAR(t.best_params[0], 1.0, 1e-4);
    EXPECT_NEAR(t.best_params[1], -2.0, 1e-4);
    EXPECT_NEAR(t.best_params[2], 0.5, 1e-4);
    EXPECT_TRUE(t.converged);
}

TEST(NelderMead, MinimizesRosenbrockWithinBudget) {
    NelderMeadConfig cfg;
    cfg.max_evaluations = 2000;
    cfg.initial_step = {0.5, 0.5};
    const OptimizationTrace t = nelder_mead(rosenbrock, {-1.2, 1.0}, cfg);
    EXPECT_LE(t.evaluation_count, 2000);
    EXPECT_NEAR(t.best_params[0], 1.0, 1e-3);
    EXPECT_NEAR(t.best_params[1], 1.0, 1e-3);
}

TEST(NelderMead, NoisyQuadraticStopsNearTheOptimum) {
    const double sigma = 1e-3;
    std::uint64_t calls = 0;
    auto noisy = [&](std::span<const double> x) {
        const double f = (x[0] - 0.3) * (x[0] - 0.3) + (x[1] + 0.1) * (x[1] + 0.1);
        std::mt19937_64 rng(derive_seed(17, {calls++}));
        return f + sigma * std::normal_distribution<double>()(rng);
    };
    NelderMeadConfig cfg;
    cfg.initial_step = {0.2, 0.2};
    cfg.x_tolerance = std::numeric_limits<double>::infinity();
    cfg.f_tolerance = 2.0 * sigma;
    cfg.max_evaluations = 300;
    const OptimizationTrace t = nelder_mead(noisy, {1.0, 1.0}, cfg);
    const double dx = t.best_params[0] - 0.3;
    const double dy = t.best_params[1] + 0.1;
    // Within a few noise widths of the minimum (f excess ~ sigma).
    EXPECT_LT(dx * dx + dy * dy, 10.0 * sigma);
    EXPECT_TRUE(t.converged);
}

TEST(NelderMead, ScaledParametersGiveTheSameCostSequence) {
    // The simplex works in coordinates normalized by the initial step, so a
    // rescaled parameter with a rescaled step follows the same path.
    const double s = 1e-3;
    auto scaled = [&](std::span<const double> x) {
        const double y[3] = {x[0] / s, x[1], x[2]};
        return quadratic(y);
    };
    NelderMeadConfig a;
    a.initial_step = {0.3, 0.2, 0.1};
    a.max_evaluations = 150;
    NelderMeadConfig b = a;
    b.initial_step[0] *= s;
    const OptimizationTrace ta = nelder_mead(quadratic, {0.2, 0.1, 0.0}, a);
    const OptimizationTrace tb = nelder_mead(scaled, {0.2 * s, 0.1, 0.0}, b);
    ASSERT_EQ(ta.evaluations.size(), tb.evaluations.size());
    for (std::size_t i = 0; i < ta.evaluations.size(); ++i) {
        EXPECT_NEAR(ta.evaluations[i].cost, tb.evaluations[i].cost, 1e-9 * (1.0 + ta.evaluations[i].cost));
    }
}

TEST(NelderMead, TraceBestIsMonotoneAndConsistent) {
    NelderMeadConfig cfg;
    cfg.max_evaluations = 120;
    const OptimizationTrace t = nelder_mead(rosenbrock, {-1.2, 1.0}, cfg);
    ASSERT_EQ(static_cast<int>(t.evaluations.size()), t.evaluation_count);
    EXPECT_LE(t.evaluation_count, 120);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : t.evaluations) {
        best = std::min(best, e.cost);
        EXPECT_EQ(e.best_cost, best);
    }
    EXPECT_EQ(t.best_cost, best);
    EXPECT_EQ(rosenbrock(t.best_params), t.best_cost);
}

TEST(NelderMead, DeterministicForDeterministicCost) {
    const OptimizationTrace a = nelder_mead(rosenbrock, {-1.2, 1.0});
    const OptimizationTrace b = nelder_mead(rosenbrock, {-1.2, 1.0});
    ASSERT_EQ(a.evaluations.size(), b.evaluations.size());
    for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
        EXPECT_EQ(a.evaluations[i].params, b.evaluations[i].params);
    }
}

TEST(NelderMead, NonFiniteCostsRankWorst) {
    // Infeasible region x > 1.5 returns NaN; the optimum (1) is inside.
    auto walled = [](std::span<const double> x) {
        if (x[0] > 1.5) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return (x[0] - 1.0) * (x[0] - 1.0);
    };
    NelderMeadConfig cfg;
    cfg.initial_step = {2.0};
    const OptimizationTrace t = nelder_mead(walled, {0.0}, cfg);
    EXPECT_NEAR(t.best_params[0], 1.0, 1e-4);
    bool saw_nan = false;
    for (const auto& e : t.evaluations) {
        saw_nan = saw_nan || std::isnan(e.cost);
        EXPECT_TRUE(std::isfinite(e.best_cost));
    }
    EXPECT_TRUE(saw_nan);
}

TEST(NelderMead, RejectsInvalidInputs) {
    auto nan_cost = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
    EXPECT_THROW(nelder_mead(nan_cost, {0.0}), std::invalid_argument);
    EXPECT_THROW(nelder_mead(quadratic, {}), std::invalid_argument);
    NelderMeadConfig cfg;
    cfg.initial_step = {1.0, 0.0, 1.0};
    EXPECT_THROW(nelder_mead(quadratic, {0, 0, 0}, cfg), std::invalid_argument);
    cfg.initial_step = {1.0};
    EXPECT_THROW(nelder_mead(quadratic, {0, 0, 0}, cfg), std::invalid_argument);
    NelderMeadConfig small;
    small.max_evaluations = 3;
    EXPECT_THROW(nelder_mead(quadratic, {0, 0, 0}, small), std::invalid_argument);
    NelderMeadConfig bad;
    bad.shrink = 0.0;
    EXPECT_THROW(nelder_mead(quadratic, {0, 0, 0}, bad), std::invalid_argument);
}
