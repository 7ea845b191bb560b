#pragma once

#include <cstdint>
#include <optional>

namespace liqd {

/// SplitMix64 stream. This is the only generator in the library; every seeded
/// operation (initialization, shuffling, noise, synthetic scenes) draws from it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept;

    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform() noexcept;

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). Plain modulo reduction; bias is below 2^-40
    /// for the bounds used here.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Uniform integer in [lo, hi] inclusive.
    int range(int lo, int hi) noexcept;

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Standard normal draws via Box-Muller over a SplitMix64 stream. Both outputs
/// of each transform are used, cosine branch first.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) noexcept : rng_(seed) {}

    double next() noexcept;
    double next(double mean, double sigma) noexcept { return mean + sigma * next(); }

private:
    SplitMix64 rng_;
    std::optional<double> spare_;
};

/// Derives an independent child seed, e.g. one per sequence or per frame.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace liqd
