#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "wicknls/lattice.hpp"

namespace wicknls {

// Counter-based pseudorandom primitives. Every draw is a pure function of the
// integers fed to it, so sampling is reproducible and order-independent under
// any parallel schedule.
namespace rng {

inline uint64_t mix(uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash2(uint64_t a, uint64_t b) { return mix(a + 0x632be59bd9b4e019ULL * mix(b)); }
inline uint64_t hash3(uint64_t a, uint64_t b, uint64_t c) { return hash2(hash2(a, b), c); }

// uniform in [2^-54, 1 - 2^-54], safe for log()
inline double uniform01(uint64_t h) {
    return (double(h >> 11) + 0.5) * 0x1p-53;
}

// Standard complex Gaussian, E|g|^2 = 1 (Re, Im independent N(0, 1/2)):
// |g|^2 ~ Exp(1), phase uniform.
inline std::complex<double> standard_complex_gaussian(uint64_t key) {
    const double u1 = uniform01(mix(key ^ 0xd1342543de82ef95ULL));
    const double u2 = uniform01(mix(key ^ 0x2545f4914f6cdd1dULL));
    const double r = std::sqrt(-std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

// Real N(0,1)
inline double standard_gaussian(uint64_t key) {
    const double u1 = uniform01(mix(key ^ 0x9f5e3bd1c8a7442bULL));
    const double u2 = uniform01(mix(key ^ 0x165667b19e3779f9ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline uint64_t mode_key(uint64_t seed, Mode n) {
    return hash3(seed, uint64_t(uint32_t(n.n1)) | (uint64_t(uint32_t(n.n2)) << 32), 0x7c15f2ddULL);
}

// Derived stream for sample i of a batch.
inline uint64_t sample_stream(uint64_t seed, uint64_t i) { return hash2(seed, i); }

} // namespace rng

// The lattice white noise {g_n}: one standard complex Gaussian per mode,
// a deterministic function of (seed, n).
struct NoiseVector {
    uint64_t seed = 0;
    int cutoff = 0;
    std::vector<std::complex<double>> g; // aligned with ModeSet::get(cutoff)

    static NoiseVector draw(uint64_t seed, int cutoff) {
        const ModeSet& ms = ModeSet::get(cutoff);
        NoiseVector w{seed, cutoff, {}};
        w.g.resize(ms.size());
        for (std::size_t i = 0; i < ms.size(); ++i)
            w.g[i] = rng::standard_complex_gaussian(rng::mode_key(seed, ms[i]));
        return w;
    }
};

} // namespace wicknls
