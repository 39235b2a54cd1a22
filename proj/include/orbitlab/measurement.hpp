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

#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace orbitlab {

struct SpamParams {
    double prep_error = 0.01;
    double readout_error_0 = 0.05;
    double readout_error_1 = 0.07;

    static SpamParams none() { return {0.0, 0.0, 0.0}; }

    void validate() const {
        for (double p : {prep_error, readout_error_0, readout_error_1}) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("SPAM probabilities must lie in [0, 1]");
            }
        }
    }
};

/// Probability of reading every qudit as ground, given basis populations of
/// `qudits` three-level systems (index = sum level_q * 3^(qudits-1-q)).
/// Levels 1 and 2 both read as "not ground".
inline double readout_ground_probability(std::span<const double> populations, int qudits, const SpamParams& spam) {
    double total = 0.0;
    for (std::size_t i = 0; i < populations.size(); ++i) {
        double weight = 1.0;
        std::size_t rest = i;
        for (int q = 0; q < qudits; ++q) {
            const bool ground = rest % 3 == 0;
            rest /= 3;
            weight *= ground ? 1.0 - spam.readout_error_0 : spam.readout_error_1;
        }
        total += weight * populations[i];
    }
    return total;
}

/// Binomial estimate of `probability` with `repetitions` shots; zero
/// repetitions returns the probability itself.
inline double sample_probability(double probability, int repetitions, std::uint64_t seed) {
    if (repetitions < 0) {
        throw std::invalid_argument("repetitions must be >= 0, got " + std::to_string(repetitions));
    }
    if (repetitions == 0) {
        return probability;
    }
    Rng rng = make_rng(seed);
    std::binomial_distribution<int> shots(repetitions, std::clamp(probability, 0.0, 1.0));
    return static_cast<double>(shots(rng)) / repetitions;
}

template <int D>
double measure_ground_probability(const Vec<D>& state, const SpamParams& spam, int repetitions,
                                  std::uint64_t seed) {
    if (std::abs(state.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("measure_ground_probability: state is not normalized");
    }
    spam.validate();
    Eigen::Matrix<double, D, 1> pops = state.cwiseAbs2();
    const int qudits = state.size() == 3 ? 1 : 2;
    const double p = readout_ground_probability(std::span<const double>(pops.data(), pops.size()), qudits, spam);
    return sample_probability(p, repetitions, seed);
}

template <int D>
double measure_ground_probability(const Mat<D>& rho, const SpamParams& spam, int repetitions, std::uint64_t seed) {
    spam.validate();
    Eigen::Matrix<double, D, 1> pops = rho.diagonal().real();
    const int qudits = rho.rows() == 3 ? 1 : 2;
    const double p = readout_ground_probability(std::span<const double>(pops.data(), pops.size()), qudits, spam);
    return sample_probability(p, repetitions, seed);
}

/// Initial density matrix of one qudit: ground with probability
/// 1 - prep_error, otherwise |1>.
inline Mat3 prepared_qudit(const SpamParams& spam) {
    Mat3 rho = Mat3::Zero();
    rho(0, 0) = 1.0 - spam.prep_error;
    rho(1, 1) = spam.prep_error;
    return rho;
}

}  // namespace orbitlab
