#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace growthcast {

// splitmix64 finalizer.
inline std::uint64_t mix_u64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG with explicitly owned state. Not std::*_distribution:
// those are implementation-defined, and every value drawn here must be
// reproducible byte-for-byte from the seed alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix_u64(state_);
    }

    // [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // {0, ..., n-1}; n must be > 0 and small relative to 2^64.
    int uniform_int(int n) { return int(next_u64() % std::uint64_t(n)); }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller, single branch so each draw consumes exactly two uniforms.
    double normal() {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    std::uint64_t state_;
};

// Independent stream for a (seed, path...) tuple, e.g. per worker, per epoch,
// per sample. Same tuple -> same stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix_u64(seed ^ 0xa0761d6478bd642fULL);
    for (std::uint64_t p : path) s = mix_u64(s ^ mix_u64(p + 0xe7037ed1a0b428dbULL));
    return s;
}

}  // namespace growthcast
