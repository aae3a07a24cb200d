// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace netmf {

// Counter-based random numbers (Philox4x64-10, Salmon et al. SC 2011).
// A draw is a pure function of (seed, stream, index pair), so results do not
// depend on thread count, scheduling, or call order. Every source of
// randomness in the library owns one stream tag below; within a stream the
// two counter words index the draw (path/particle, step/column, ...).

enum class Stream : std::uint64_t {
    initial_state = 1,
    position = 2,
    brownian = 3,
    disorder = 4,
    subsample = 5,
    derive = 6,   // seed derivation for sweeps / sub-experiments
    fixture = 7,  // randomized test fixtures
};

namespace philox {

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    return static_cast<std::uint64_t>(p);
}

// One 4x64 block, 10 rounds.
inline std::array<std::uint64_t, 4> block(std::uint64_t key0, std::uint64_t key1,
                                          std::array<std::uint64_t, 4> ctr) {
    constexpr std::uint64_t M0 = 0xD2B74407B1CE6E93ULL;
    constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, hi1;
        const std::uint64_t lo0 = mulhilo(M0, ctr[0], hi0);
        const std::uint64_t lo1 = mulhilo(M1, ctr[2], hi1);
        ctr = {hi1 ^ ctr[1] ^ key0, lo1, hi0 ^ ctr[3] ^ key1, lo0};
        key0 += W0;
        key1 += W1;
    }
    return ctr;
}

}  // namespace philox

// Raw 64-bit draw for (seed, stream, i, j).
inline std::uint64_t rng_u64(std::uint64_t seed, Stream stream, std::uint64_t i,
                             std::uint64_t j, int lane = 0) {
    return philox::block(seed, static_cast<std::uint64_t>(stream), {i, j, 0, 0})[lane & 3];
}

// Uniform double in (0,1); never returns 0 or 1.
inline double rng_u01(std::uint64_t seed, Stream stream, std::uint64_t i, std::uint64_t j,
                      int lane = 0) {
    const std::uint64_t bits = rng_u64(seed, stream, i, j, lane);
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Standard normal via Box-Muller on lanes (2*lane, 2*lane+1) of one block.
inline double rng_normal(std::uint64_t seed, Stream stream, std::uint64_t i,
                         std::uint64_t j, int pair = 0) {
    const auto b = philox::block(seed, static_cast<std::uint64_t>(stream), {i, j, 0, 0});
    const double u1 = static_cast<double>(b[2 * (pair & 1)] >> 11) * 0x1.0p-53 + 0x1.0p-54;
    const double u2 = static_cast<double>(b[2 * (pair & 1) + 1] >> 11) * 0x1.0p-53 + 0x1.0p-54;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Derived seed for a tagged sub-experiment of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
    return rng_u64(master, Stream::derive, tag, index);
}

}  // namespace netmf
