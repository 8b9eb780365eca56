#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace transcend {

/// SplitMix64 finalizer; used to derive independent per-unit streams from a root seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t unit) noexcept
{
    return mix64(mix64(root) ^ mix64(unit + 0x632be59bd9b4e019ULL));
}

/// Seeded random source. The engine is std::mt19937_64; the value transforms are
/// spelled out here (rather than std::*_distribution) so streams are identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n must be > 0.
    std::size_t below(std::size_t n)
    {
        const std::uint64_t bound = n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
            - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x = engine_();
        while (x >= limit)
            x = engine_();
        return static_cast<std::size_t>(x % bound);
    }

    /// Inclusive integer range.
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }

    /// Index drawn from non-negative weights (need not be normalized). Returns the
    /// last positive entry when rounding runs past the cumulative total.
    std::size_t categorical(std::span<const double> weights)
    {
        double total = 0.0;
        for (double w : weights)
            total += w;
        const double u = uniform() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0)
                continue;
            acc += weights[i];
            last_positive = i;
            if (u < acc)
                return i;
        }
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace transcend
