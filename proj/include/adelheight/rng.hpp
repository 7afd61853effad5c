#pragma once

#include <cstdint>

namespace adelheight {

// splitmix64: tiny deterministic stream, used for seeded perturbations and
// branch choices; per-point streams derive from (seed, index)
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}
    static SplitMix64 derive(uint64_t seed, uint64_t index) {
        SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        g.next();
        return g;
    }

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // uniform in {0, ..., n-1}
    uint64_t next_below(uint64_t n) { return next() % n; }
};

} // namespace adelheight
