#pragma once

// Counter-based random numbers. A stream is identified by (seed, key...) so
// block t of replication r can be generated without touching any other block.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace feemarket {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a list of keys into one 64-bit stream identifier.
inline constexpr std::uint64_t derive_key(std::uint64_t seed,
                                          std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x3c6ef372fe94f82bULL));
    return h;
}

/// SplitMix64 over an explicit counter. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t stream) noexcept : stream_(stream) {}
    CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept
        : stream_(derive_key(seed, keys)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return splitmix64(stream_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) noexcept { return uniform() < p; }
    /// +1 or -1 with equal probability.
    double sign() noexcept { return ((*this)() >> 63) ? 1.0 : -1.0; }
    /// Uniform integer in [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
        const std::uint64_t span = hi - lo + 1;
        if (span == 0) return (*this)();
        // Lemire's multiply-shift; the bias is below 2^-64 * span.
        return lo + static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * span) >> 64);
    }

private:
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace feemarket
