#ifndef GEOFENCE_RNG_HPP
#define GEOFENCE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace geofence {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for an independent substream `stream` of a parent seed.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

/**
 * Seeded random stream.
 *
 * Draws are built from raw mt19937_64 output rather than the
 * <random> distributions, whose algorithms differ between standard
 * libraries; a seed therefore reproduces the same sequence everywhere.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the draw unbiased.
        const std::uint64_t limit = (~n + 1) % n;
        std::uint64_t r = engine_();
        while (r < limit) r = engine_();
        return r % n;
    }

    /// Number of failures before the first success of Bernoulli(p) trials.
    std::int64_t geometric(double p) {
        if (p >= 1.0) return 0;
        const double u = 1.0 - uniform();  // (0, 1]
        const double k = std::floor(std::log(u) / std::log1p(-p));
        if (!(k < 9.0e18)) return INT64_MAX;
        return static_cast<std::int64_t>(k);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace geofence

#endif  // GEOFENCE_RNG_HPP
