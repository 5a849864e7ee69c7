#pragma once

#include <cstdint>
#include <random>

namespace billiard {

// splitmix64 finalizer; used for seed derivation and config hashing so that
// per-trial seeds are stable across platforms and worker counts.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
}

// mt19937_64 gives identical streams on every conforming implementation.
// Distributions from <random> do not, so uniform draws are done by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool coin() { return (engine_() & 1ull) != 0; }

private:
    std::mt19937_64 engine_;
};

} // namespace billiard
