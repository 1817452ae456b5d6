#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sepstab/errors.hpp"

namespace sepstab {

// Seedable, splittable random stream. Substreams are derived by mixing the
// parent seed with the child index (SplitMix64), so trials can be distributed
// without coordinating a shared generator and identical seeds reproduce
// identical outcome sequences regardless of evaluation order.
//
// Uniform doubles are produced from the top 53 bits of the mt19937_64 output
// rather than std::uniform_real_distribution, so streams are reproducible
// across standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    RngStream substream(std::uint64_t index) const {
        return RngStream(mix(seed_ + 0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Samples an index from an unnormalized nonnegative weight vector.
    std::size_t discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0))
            throw InvalidParameters("discrete sampling needs positive total weight");
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

    // Standard normal via Box-Muller (uses two uniforms per pair).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // SplitMix64 finalizer
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace sepstab
