#pragma once

// Exact finite-space probability primitives: probability vectors, temperature
// transforms, argmax distributions, mixtures and normalized entropy.

#include <transcend/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace transcend {

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kDefaultTieEps = 1e-9;

/// Per-output support mask; empty means "every output is in the support".
using SupportMask = std::span<const std::uint8_t>;

class Dist;
inline Dist detail_make_dist(std::vector<double> probs);

/// A probability vector over a finite output space. Entries are non-negative and
/// sum to 1 within kSumTolerance; the dimension is fixed at construction.
class Dist {
public:
    /// Validates and adopts `probs`.
    static Dist from_probs(std::vector<double> probs)
    {
        if (probs.empty())
            throw Error(Errc::InvalidDist, "distribution must have dimension >= 1");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw Error(Errc::InvalidDist, "entry is negative or not finite");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw Error(Errc::InvalidDist, "entries sum to " + std::to_string(sum));
        return Dist(std::move(probs));
    }

    static Dist uniform(std::size_t n)
    {
        if (n == 0)
            throw Error(Errc::InvalidDist, "distribution must have dimension >= 1");
        return Dist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    static Dist one_hot(std::size_t n, std::size_t index)
    {
        if (index >= n)
            throw Error(Errc::IndexOutOfRange, "one-hot index outside dimension");
        std::vector<double> p(n, 0.0);
        p[index] = 1.0;
        return Dist(std::move(p));
    }

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }
    auto begin() const noexcept { return probs_.begin(); }
    auto end() const noexcept { return probs_.end(); }

    double max() const { return *std::max_element(probs_.begin(), probs_.end()); }

    friend bool operator==(const Dist&, const Dist&) = default;

private:
    explicit Dist(std::vector<double> probs) : probs_(std::move(probs)) {}

    std::vector<double> probs_;

    friend Dist detail_make_dist(std::vector<double> probs);
};

/// Renormalization guard for results that are already a distribution up to
/// accumulation error: divides by the sum only when it drifts past 1e-13.
inline Dist detail_make_dist(std::vector<double> probs)
{
    double sum = 0.0;
    for (double p : probs)
        sum += p;
    if (std::abs(sum - 1.0) > 1e-13)
        for (double& p : probs)
            p /= sum;
    return Dist(std::move(probs));
}

inline double sup_distance(const Dist& a, const Dist& b)
{
    if (a.size() != b.size())
        throw Error(Errc::DimensionMismatch, "sup_distance on different dimensions");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Positive temperature, or the distinguished ZERO value meaning exact argmax.
class Temperature {
public:
    explicit Temperature(double tau) : tau_(tau)
    {
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw Error(Errc::InvalidTemperature, "temperature must be positive and finite");
    }

    static constexpr Temperature zero() noexcept { return Temperature(); }

    constexpr bool is_zero() const noexcept { return tau_ == 0.0; }
    constexpr double value() const noexcept { return tau_; }

    friend constexpr bool operator==(Temperature, Temperature) = default;

private:
    constexpr Temperature() = default;
    double tau_ = 0.0;
};

enum class TemperScheme { SoftmaxOnProbs, PowerOnProbs };

constexpr std::string_view to_string(TemperScheme s) noexcept
{
    return s == TemperScheme::SoftmaxOnProbs ? "softmax_on_probs" : "power_on_probs";
}

inline std::optional<TemperScheme> parse_temper_scheme(std::string_view s) noexcept
{
    if (s == "softmax_on_probs" || s == "softmax")
        return TemperScheme::SoftmaxOnProbs;
    if (s == "power_on_probs" || s == "power")
        return TemperScheme::PowerOnProbs;
    return std::nullopt;
}

inline Dist normalize(std::span<const double> weights)
{
    if (weights.empty())
        throw Error(Errc::InvalidDist, "cannot normalize an empty vector");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error(Errc::NegativeWeight, "weights must be finite and non-negative");
        sum += w;
    }
    if (sum == 0.0)
        throw Error(Errc::AllZero, "every weight is zero");
    std::vector<double> p(weights.begin(), weights.end());
    for (double& x : p)
        x /= sum;
    return detail_make_dist(std::move(p));
}

namespace detail {

inline bool in_support(SupportMask support, std::size_t i)
{
    return support.empty() || support[i] != 0;
}

inline void check_support(const Dist& q, SupportMask support)
{
    if (!support.empty() && support.size() != q.size())
        throw Error(Errc::DimensionMismatch, "support mask dimension differs from distribution");
}

} // namespace detail

/// Uniform over { y : q_y >= max(q) - tie_eps }, restricted to `support` when given.
inline Dist argmax_dist(const Dist& q, double tie_eps = kDefaultTieEps, SupportMask support = {})
{
    detail::check_support(q, support);
    double best = -1.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (detail::in_support(support, i))
            best = std::max(best, q[i]);
    if (best < 0.0)
        throw Error(Errc::AllZero, "support mask is empty");
    std::vector<double> w(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
        if (detail::in_support(support, i) && q[i] >= best - tie_eps)
            w[i] = 1.0;
    return normalize(w);
}

/// softmax(q; tau)_y = exp(q_y / tau) / sum exp(q_y' / tau), evaluated with the
/// max shifted out. Outputs outside `support` receive zero mass.
inline Dist softmax_on_probs(const Dist& q, Temperature tau, SupportMask support = {})
{
    if (tau.is_zero())
        return argmax_dist(q, kDefaultTieEps, support);
    detail::check_support(q, support);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.size(); ++i)
        if (detail::in_support(support, i))
            m = std::max(m, q[i]);
    std::vector<double> w(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
        if (detail::in_support(support, i))
            w[i] = std::exp((q[i] - m) / tau.value());
    return normalize(w);
}

/// q_y^(1/tau) renormalized, evaluated in log space. tau = 1 returns q unchanged.
/// Zero entries stay zero, so the support never grows.
inline Dist power_on_probs(const Dist& q, Temperature tau, SupportMask support = {})
{
    if (tau.is_zero())
        return argmax_dist(q, kDefaultTieEps, support);
    detail::check_support(q, support);
    if (tau.value() == 1.0 && support.empty())
        return q;
    std::vector<double> logw(q.size(), -std::numeric_limits<double>::infinity());
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0 && detail::in_support(support, i)) {
            logw[i] = std::log(q[i]) / tau.value();
            m = std::max(m, logw[i]);
        }
    }
    if (m == -std::numeric_limits<double>::infinity())
        throw Error(Errc::ZeroSupportCollapse, "no positive mass inside the support");
    std::vector<double> w(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
        if (logw[i] != -std::numeric_limits<double>::infinity())
            w[i] = std::exp(logw[i] - m);
    return normalize(w);
}

inline Dist temper(const Dist& q, Temperature tau, TemperScheme scheme, SupportMask support = {})
{
    return scheme == TemperScheme::SoftmaxOnProbs ? softmax_on_probs(q, tau, support)
                                                  : power_on_probs(q, tau, support);
}

/// Weighted entrywise average; weights default to uniform 1/k and are normalized.
inline Dist mix(std::span<const Dist> dists, std::span<const double> weights = {})
{
    if (dists.empty())
        throw Error(Errc::InvalidDist, "mixture of zero distributions");
    const std::size_t n = dists.front().size();
    for (const Dist& d : dists)
        if (d.size() != n)
            throw Error(Errc::DimensionMismatch, "mixture components differ in dimension");
    std::vector<double> w;
    if (weights.empty()) {
        w.assign(dists.size(), 1.0 / static_cast<double>(dists.size()));
    } else {
        if (weights.size() != dists.size())
            throw Error(Errc::DimensionMismatch, "one weight per component required");
        const Dist wn = normalize(weights);
        w.assign(wn.begin(), wn.end());
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < dists.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            out[i] += w[k] * dists[k][i];
    return detail_make_dist(std::move(out));
}

/// Shannon entropy (bits) of empirical frequencies divided by log2(support_size).
inline double normalized_entropy(std::span<const std::uint64_t> counts, std::uint64_t support_size)
{
    if (support_size < 2)
        throw Error(Errc::SupportTooSmall, "support size must be >= 2");
    std::uint64_t total = 0;
    std::uint64_t nonzero = 0;
    for (std::uint64_t c : counts) {
        total += c;
        nonzero += c > 0 ? 1 : 0;
    }
    if (total == 0)
        throw Error(Errc::AllZero, "no observations");
    if (nonzero > support_size)
        throw Error(Errc::DimensionMismatch, "more observed actions than the support size");
    double h = 0.0;
    const double n = static_cast<double>(total);
    for (std::uint64_t c : counts) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return std::clamp(h / std::log2(static_cast<double>(support_size)), 0.0, 1.0);
}

} // namespace transcend
