// Copyright 2026 The seqcluster Authors
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

// Reproducible random streams. Every Monte Carlo trial owns a std::mt19937_64
// seeded from a hash of (master seed, trial index), so results do not depend
// on how trials are distributed across workers.

#ifndef SEQCLUSTER_RANDOM_H
#define SEQCLUSTER_RANDOM_H

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace seqcluster {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser: a bijective 64-bit mixing function.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of the stream for one trial (or any other indexed sub-task).
inline uint64_t stream_seed(uint64_t master_seed, uint64_t index) { return mix64(mix64(master_seed) ^ mix64(~index)); }

inline Rng make_stream(uint64_t master_seed, uint64_t index) { return Rng(stream_seed(master_seed, index)); }

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng &rng) { return double(rng() >> 11) * 0x1.0p-53; }

/// Number of failures before the next success of a Bernoulli(p) sequence, given
/// log1m = log(1 - p). Returns a huge value for p = 0.
inline uint64_t geometric_skip(Rng &rng, double log1m) {
    if (log1m == 0.0) {
        return std::numeric_limits<uint64_t>::max();
    }
    double u = 1.0 - uniform01(rng);  // (0, 1]
    double k = std::floor(std::log(u) / log1m);
    if (!(k < 1e18)) {
        return std::numeric_limits<uint64_t>::max();
    }
    return uint64_t(k);
}

}  // namespace seqcluster

#endif  // SEQCLUSTER_RANDOM_H
