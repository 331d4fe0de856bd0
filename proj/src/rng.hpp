// Deterministic RNG for the simulator: xoshiro256++ seeded through
// splitmix64. Hand-rolled instead of <random> engines/distributions so the
// bit streams are identical across standard libraries and platforms; every
// simulation result that goes into a regression baseline depends on that.
//
// Each (seed, stream) pair gives an independent generator; the simulator
// uses stream = trial index so trial results do not depend on how trials
// are scheduled across threads.
#pragma once

#include <array>
#include <cstdint>

namespace cachenet {

inline uint64_t splitmix64_next(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Xoshiro256pp {
public:
    Xoshiro256pp() : Xoshiro256pp(0, 0) {}

    Xoshiro256pp(uint64_t seed, uint64_t stream) {
        uint64_t x = seed;
        uint64_t a = splitmix64_next(x);
        uint64_t b = splitmix64_next(x);
        // Fold the stream id through a second splitmix pass so that nearby
        // stream ids (0,1,2,...) give uncorrelated states.
        uint64_t y = a ^ (stream * 0x9e3779b97f4a7c15ULL + b);
        for (auto& w : s_) w = splitmix64_next(y);
        if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[0] = 0x9e3779b97f4a7c15ULL;
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound), bound >= 1; unbiased via rejection.
    uint64_t next_below(uint64_t bound) {
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static uint64_t rotl(uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::array<uint64_t, 4> s_;
};

} // namespace cachenet
