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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace orbitlab {

using Rng = std::mt19937_64;

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Counter-based child seed: a pure function of the parent seed and the
/// stream coordinates, so the order in which children are created (or the
/// thread that creates them) never changes what they draw.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = detail::splitmix64(parent);
    for (std::uint64_t p : path) {
        h = detail::splitmix64(h ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline Rng make_rng(std::uint64_t seed) {
    return Rng(seed);
}

// Stream tags used when splitting seeds, so different consumers of one
// master seed never collide.
enum class Stream : std::uint64_t {
    sequences = 1,
    shots = 2,
    aggressor = 3,
    perturbation = 4,
    optimizer = 5,
    verification = 6,
};

constexpr std::uint64_t tag(Stream s) {
    return static_cast<std::uint64_t>(s);
}

}  // namespace orbitlab
