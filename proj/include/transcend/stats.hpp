#pragma once

#include <transcend/error.hpp>
#include <transcend/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace transcend::stats {

inline double mean(std::span<const double> v)
{
    if (v.empty())
        return 0.0;
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

inline double median(std::span<const double> v)
{
    if (v.empty())
        return 0.0;
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

inline double sample_stddev(std::span<const double> v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Linear-interpolated quantile of sorted data, q in [0, 1].
inline double quantile_sorted(std::span<const double> sorted, double q)
{
    if (sorted.empty())
        return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct Interval {
    double low = 0.0;
    double high = 0.0;

    bool contains(double x) const noexcept { return low <= x && x <= high; }
    double width() const noexcept { return high - low; }
};

/// Percentile bootstrap interval for the mean.
inline Interval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples, double level, Rng& rng)
{
    if (values.empty())
        throw Error(Errc::EmptyStateList, "bootstrap of an empty sample");
    std::vector<double> means(resamples);
    const std::size_t n = values.size();
    for (std::size_t b = 0; b < resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += values[rng.below(n)];
        means[b] = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - level) / 2.0;
    return {quantile_sorted(means, alpha), quantile_sorted(means, 1.0 - alpha)};
}

/// Fixed-width bins over [lo, hi]; values outside are clamped into the edge bins.
struct Histogram {
    double lo = -0.3;
    double hi = 0.3;
    std::vector<std::size_t> counts;

    Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0) {}

    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double bin_low(std::size_t i) const { return lo + width() * static_cast<double>(i); }

    std::size_t bin_of(double v) const
    {
        const double pos = std::floor((v - lo) / width());
        if (!(pos > 0.0))
            return 0;
        return std::min(static_cast<std::size_t>(pos), counts.size() - 1);
    }

    void add(double v) { ++counts[bin_of(v)]; }
};

} // namespace transcend::stats
