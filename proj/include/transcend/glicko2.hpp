#pragma once

#include <transcend/error.hpp>
#include <transcend/stats.hpp>

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

namespace transcend::glicko2 {

inline constexpr double kScale = 173.7178;
inline constexpr double kBase = 1500.0;
inline constexpr double kDefaultSystemTau = 0.5;
inline constexpr double kMaxRd = 500.0;
inline constexpr double kConvergence = 1e-6;
inline constexpr int kMaxIterations = 100;

struct Rating {
    double rating = kBase;
    double rd = 350.0;
    double volatility = 0.06;

    double mu() const noexcept { return (rating - kBase) / kScale; }
    double phi() const noexcept { return rd / kScale; }

    static Rating from_internal(double mu, double phi, double sigma)
    {
        return {mu * kScale + kBase, phi * kScale, sigma};
    }

    void validate() const
    {
        if (!std::isfinite(rating) || !(rd > 0.0 && rd <= kMaxRd) || !(volatility > 0.0 && volatility < 1.0))
            throw Error(Errc::InvalidRating, "rating triple outside its domain");
    }
};

struct MatchRecord {
    Rating opponent;
    double score = 0.0;
};

inline void check_score(double s)
{
    if (s != 0.0 && s != 0.5 && s != 1.0)
        throw Error(Errc::InvalidRating, "score must be 0, 0.5 or 1");
}

inline double g(double phi) { return 1.0 / std::sqrt(1.0 + 3.0 * phi * phi / (std::numbers::pi * std::numbers::pi)); }

inline double expected(double mu, double mu_j, double phi_j) { return 1.0 / (1.0 + std::exp(-g(phi_j) * (mu - mu_j))); }

/// Expected score of `a` against `b` on the display scale.
inline double expected_score(const Rating& a, const Rating& b) { return expected(a.mu(), b.mu(), b.phi()); }

namespace detail {

inline double solve_volatility(double phi, double sigma, double v, double delta, double tau)
{
    const double a = std::log(sigma * sigma);
    const double phi2 = phi * phi;
    const auto f = [&](double x) {
        const double ex = std::exp(x);
        const double d = phi2 + v + ex;
        return ex * (delta * delta - phi2 - v - ex) / (2.0 * d * d) - (x - a) / (tau * tau);
    };
    double A = a;
    double B;
    if (delta * delta > phi2 + v) {
        B = std::log(delta * delta - phi2 - v);
    } else {
        int k = 1;
        while (f(a - k * tau) < 0.0) {
            if (++k > kMaxIterations)
                throw Error(Errc::NonConvergence, "volatility bracket not found");
        }
        B = a - k * tau;
    }
    double fA = f(A);
    double fB = f(B);
    for (int it = 0; std::abs(B - A) > kConvergence; ++it) {
        if (it >= kMaxIterations)
            throw Error(Errc::NonConvergence, "volatility iteration did not converge");
        const double C = A + (A - B) * fA / (fB - fA);
        const double fC = f(C);
        if (fC * fB <= 0.0) {
            A = B;
            fA = fB;
        } else {
            fA /= 2.0;
        }
        B = C;
        fB = fC;
    }
    return std::exp(A / 2.0);
}

} // namespace detail

/// One rating period. Results may be empty, in which case only RD grows.
inline Rating update(const Rating& player, std::span<const MatchRecord> results,
                     double system_tau = kDefaultSystemTau)
{
    player.validate();
    if (!(system_tau > 0.0))
        throw Error(Errc::InvalidRating, "system tau must be positive");
    const double mu = player.mu();
    const double phi = player.phi();
    const double sigma = player.volatility;
    const double max_phi = kMaxRd / kScale;
    if (results.empty())
        return Rating::from_internal(mu, std::min(std::sqrt(phi * phi + sigma * sigma), max_phi), sigma);

    double v_inv = 0.0;
    double sum = 0.0;
    for (const MatchRecord& m : results) {
        check_score(m.score);
        m.opponent.validate();
        const double gj = g(m.opponent.phi());
        const double e = expected(mu, m.opponent.mu(), m.opponent.phi());
        v_inv += gj * gj * e * (1.0 - e);
        sum += gj * (m.score - e);
    }
    const double v = 1.0 / v_inv;
    const double delta = v * sum;
    const double sigma_new = detail::solve_volatility(phi, sigma, v, delta, system_tau);
    const double phi_star = std::sqrt(phi * phi + sigma_new * sigma_new);
    const double phi_new = std::min(1.0 / std::sqrt(1.0 / (phi_star * phi_star) + 1.0 / v), max_phi);
    const double mu_new = mu + phi_new * phi_new * sum;
    return Rating::from_internal(mu_new, phi_new, sigma_new);
}

/// Win/draw/loss counts against one fixed anchor.
struct AnchorResult {
    Rating anchor;
    std::size_t wins = 0;
    std::size_t draws = 0;
    std::size_t losses = 0;

    std::size_t games() const noexcept { return wins + draws + losses; }
};

enum class PeriodMode { Single, PerAnchor };

constexpr std::string_view to_string(PeriodMode m) noexcept { return m == PeriodMode::Single ? "single" : "per_anchor"; }

inline PeriodMode parse_period_mode(std::string_view s)
{
    if (s == "single")
        return PeriodMode::Single;
    if (s == "per_anchor")
        return PeriodMode::PerAnchor;
    throw Error(Errc::ConfigError, "unknown period mode: " + std::string(s));
}

struct AnchoredRating {
    Rating rating;
    stats::Interval ci;  // [R - 2 RD, R + 2 RD]
    std::size_t n_games = 0;
};

inline std::vector<MatchRecord> expand(const AnchorResult& r)
{
    std::vector<MatchRecord> out;
    out.reserve(r.games());
    out.insert(out.end(), r.wins, MatchRecord{r.anchor, 1.0});
    out.insert(out.end(), r.draws, MatchRecord{r.anchor, 0.5});
    out.insert(out.end(), r.losses, MatchRecord{r.anchor, 0.0});
    return out;
}

/// Rates a new player from games against frozen anchors.
inline AnchoredRating rate_anchored(std::span<const AnchorResult> results, PeriodMode mode = PeriodMode::Single,
                                    double system_tau = kDefaultSystemTau, Rating prior = {})
{
    std::size_t n = 0;
    for (const AnchorResult& r : results)
        n += r.games();
    if (n == 0)
        throw Error(Errc::NoGames, "no games to rate");
    Rating cur = prior;
    if (mode == PeriodMode::Single) {
        std::vector<MatchRecord> all;
        for (const AnchorResult& r : results) {
            const auto part = expand(r);
            all.insert(all.end(), part.begin(), part.end());
        }
        cur = update(cur, all, system_tau);
    } else {
        for (const AnchorResult& r : results)
            if (r.games() > 0)
                cur = update(cur, expand(r), system_tau);
    }
    return {cur, {cur.rating - 2.0 * cur.rd, cur.rating + 2.0 * cur.rd}, n};
}

/// mean +- 1.96 sigma.
inline stats::Interval ci95_sigma(double mean, double sigma)
{
    if (!(sigma >= 0.0))
        throw Error(Errc::InvalidRating, "sigma must be non-negative");
    return {mean - 1.96 * sigma, mean + 1.96 * sigma};
}

inline nlohmann::json to_json(const AnchoredRating& r)
{
    return {{"rating", r.rating.rating},
            {"rd", r.rating.rd},
            {"volatility", r.rating.volatility},
            {"ci_low", r.ci.low},
            {"ci_high", r.ci.high},
            {"n_games", r.n_games}};
}

} // namespace transcend::glicko2
