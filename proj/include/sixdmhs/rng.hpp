// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

#include "sixdmhs/common.hpp"

namespace sixdmhs {

// splitmix64; used both as a generator and to derive independent stream seeds.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic, platform-independent generator. Distributions are hand-rolled
// (uniform via 53-bit mantissa, normal via Box-Muller) so that identical seeds
// give bit-identical streams everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Derive a child seed for an independent stream.
    static uint64_t derive(uint64_t seed, uint64_t stream) {
        uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
        return splitmix64(s);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    // CN(0, variance): complex Gaussian, E|z|^2 = variance.
    cplx cnormal(double variance = 1.0) {
        double s = std::sqrt(variance / 2.0);
        return {s * normal(), s * normal()};
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sixdmhs
