#pragma once

#include <cmath>
#include <cstdint>

namespace tcs {

// Stateless counter-based generator: every draw is a pure function of
// (seed, index), so parallel evaluation order cannot perturb streams and
// the same key always reproduces the same bytes on any platform.
// Mixing function is SplitMix64's finalizer applied to seed ^ f(index).
inline std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in (0, 1]; never 0 so it is safe under log().
inline double uniform_open(std::uint64_t seed, std::uint64_t index) {
    return (static_cast<double>(hash_u64(seed, index) >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal keyed by (seed, index) via Box-Muller (cosine branch).
inline double gaussian(std::uint64_t seed, std::uint64_t index) {
    const double u1 = uniform_open(seed, 2 * index);
    const double u2 = uniform_open(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Combine a seed with a stream tag (storm index, restart number, ...) so
// nested deterministic streams never collide.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    return hash_u64(seed, 0x5eed5eed5eed5eedULL ^ tag);
}

// Sequential view over the counter generator, for consumers that want a
// stream (k-means seeding) rather than indexed access.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return hash_u64(seed_, counter_++); }
    double next_double() { return uniform_open(seed_, counter_++); } // (0,1]
    // Uniform index in [0, n); n must be positive.
    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// FNV-1a, used wherever a seed or split decision is derived from a string.
inline std::uint64_t fnv1a(const char* data, std::size_t n) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace tcs
