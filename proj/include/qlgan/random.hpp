// Copyright 2026 The qlgan Authors
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

/**
 * @file
 * Seeded random streams.
 *
 * Every stochastic component draws from its own labelled stream derived from
 * a master seed, so that adding draws in one component never perturbs
 * another. Streams are std::mt19937_64 engines whose seed is
 * splitmix64(master ^ splitmix64(fnv1a64(label))).
 */
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qlgan {

using Rng = std::mt19937_64;

/// Name recorded in config echoes so runs can be reproduced across builds.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64/splitmix64-fnv1a64";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline Rng make_stream(std::uint64_t seed, std::string_view label) {
    return Rng(splitmix64(seed ^ splitmix64(fnv1a64(label))));
}

/// Child stream keyed by an integer (epoch, sample index, ...).
inline Rng make_stream(std::uint64_t seed, std::string_view label,
                       std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed ^ splitmix64(fnv1a64(label))) +
                          splitmix64(index)));
}

inline double uniform01(Rng &rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng &rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

} // namespace qlgan
