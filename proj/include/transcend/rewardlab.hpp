#pragma once

// Reward functionals, the transcendence predicate, executable checks of the
// four temperature/mixture theorems, and the favor analysis.

#include <transcend/dist.hpp>
#include <transcend/error.hpp>
#include <transcend/experts.hpp>
#include <transcend/random.hpp>
#include <transcend/stats.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace transcend {

/// Strict inequalities between rewards use this margin; gaps in (-eps, eps] are ties.
inline constexpr double kStrictEps = 1e-9;

inline const std::vector<double>& default_tau_grid()
{
    static const std::vector<double> grid{1.0, 0.75, 0.5, 0.25, 0.1, 0.05, 0.01, 0.005, 0.001};
    return grid;
}

// ---------------------------------------------------------------------------
// Reward functionals

inline double state_reward(const Dist& row, std::span<const double> rewards)
{
    if (row.size() != rewards.size())
        throw Error(Errc::DimensionMismatch, "distribution and reward row differ in length");
    double s = 0.0;
    for (std::size_t y = 0; y < row.size(); ++y)
        if (row[y] != 0.0)
            s += row[y] * rewards[y];
    return s;
}

/// r_x(f) = E_{y ~ f(.|x)} r(x, y)
inline double state_reward(const Policy& policy, std::size_t x, const RewardTable& table)
{
    return state_reward(policy(x), table.row(x));
}

/// R_{p_test}(f) = E_{x ~ p_test} r_x(f)
inline double expected_reward(const Policy& policy, const Dist& p_test, const RewardTable& table)
{
    if (policy.num_inputs() != table.num_inputs() || p_test.size() != table.num_inputs())
        throw Error(Errc::DimensionMismatch, "policy, p_test and reward table disagree on |X|");
    double s = 0.0;
    for (std::size_t x = 0; x < table.num_inputs(); ++x)
        if (p_test[x] != 0.0)
            s += p_test[x] * state_reward(policy, x, table);
    return s;
}

inline double expected_reward(const Policy& policy, const Instance& inst)
{
    return expected_reward(policy, inst.p_test(), inst.reward());
}

/// R(candidate) - max_i R(f_i); positive means transcendence.
inline double transcendence_gap(const Policy& candidate, std::span<const Policy> experts, const Dist& p_test,
                                const RewardTable& table)
{
    if (experts.empty())
        throw Error(Errc::InvalidDist, "no experts to compare against");
    double best = -std::numeric_limits<double>::infinity();
    for (const Policy& e : experts)
        best = std::max(best, expected_reward(e, p_test, table));
    return expected_reward(candidate, p_test, table) - best;
}

enum class GapClass { Below, Tie, Transcends };

constexpr GapClass classify_gap(double gap) noexcept
{
    if (gap > kStrictEps)
        return GapClass::Transcends;
    if (gap > -kStrictEps)
        return GapClass::Tie;
    return GapClass::Below;
}

constexpr std::string_view to_string(GapClass c) noexcept
{
    switch (c) {
    case GapClass::Below: return "below";
    case GapClass::Tie: return "tie";
    case GapClass::Transcends: return "transcends";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Seeded random instances. Rewards are i.i.d. uniform [0, 1), each row redrawn
// until non-constant.

inline RewardTable random_reward_table(Rng& rng, std::size_t num_inputs, std::size_t num_outputs)
{
    if (num_outputs < 2)
        throw Error(Errc::InvalidInstance, "need >= 2 outputs for a non-constant reward row");
    std::vector<double> r(num_inputs * num_outputs);
    for (std::size_t x = 0; x < num_inputs; ++x) {
        for (;;) {
            for (std::size_t y = 0; y < num_outputs; ++y)
                r[x * num_outputs + y] = rng.uniform();
            const auto first = r.begin() + static_cast<std::ptrdiff_t>(x * num_outputs);
            if (std::any_of(first, first + static_cast<std::ptrdiff_t>(num_outputs), [&](double v) { return v != *first; }))
                break;
        }
    }
    return RewardTable(num_inputs, num_outputs, std::move(r));
}

/// Random distribution; with `sparse`, each entry is zeroed with probability 1/3
/// (at least one entry always survives).
inline Dist random_dist(Rng& rng, std::size_t n, bool sparse = false)
{
    std::vector<double> w(n);
    for (double& v : w)
        v = -std::log(1.0 - rng.uniform());
    if (sparse) {
        const std::size_t keep = rng.below(n);
        for (std::size_t i = 0; i < n; ++i)
            if (i != keep && rng.below(3) == 0)
                w[i] = 0.0;
    }
    return normalize(w);
}

inline Policy random_policy(Rng& rng, std::size_t num_inputs, std::size_t num_outputs, std::string label = "random",
                            bool sparse = false)
{
    std::vector<Dist> rows;
    rows.reserve(num_inputs);
    for (std::size_t x = 0; x < num_inputs; ++x)
        rows.push_back(random_dist(rng, num_outputs, sparse));
    return Policy(std::move(label), std::move(rows));
}

inline Instance random_instance(Rng& rng, std::size_t num_inputs, std::size_t num_outputs)
{
    RewardTable table = random_reward_table(rng, num_inputs, num_outputs);
    Dist p = random_dist(rng, num_inputs);
    Dist p_test = random_dist(rng, num_inputs, true);
    return Instance(std::move(table), std::move(p), std::move(p_test));
}

inline Partition random_partition(Rng& rng, std::size_t num_inputs, std::size_t cells)
{
    if (cells < 2 || cells > num_inputs)
        throw Error(Errc::BadPartition, "need 2 <= cells <= |X|");
    std::vector<std::size_t> order(num_inputs);
    for (std::size_t i = 0; i < num_inputs; ++i)
        order[i] = i;
    for (std::size_t i = num_inputs; i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);
    Partition partition(cells);
    for (std::size_t i = 0; i < num_inputs; ++i)
        partition[i < cells ? i : rng.below(cells)].push_back(order[i]);
    for (auto& c : partition)
        std::sort(c.begin(), c.end());
    return partition;
}

// ---------------------------------------------------------------------------
// Theorem verification

enum class Verdict { Holds, Violated };

constexpr std::string_view to_string(Verdict v) noexcept { return v == Verdict::Holds ? "holds" : "violated"; }

/// Outcome of one executable theorem check. The witness always carries the
/// values the verdict was decided on, so a violation is a concrete counterexample.
struct TheoremReport {
    int theorem = 0;
    std::string instance;
    Verdict verdict = Verdict::Holds;
    nlohmann::json witness = nlohmann::json::object();
    std::optional<TemperScheme> scheme;
    std::vector<double> tau_grid;

    bool holds() const noexcept { return verdict == Verdict::Holds; }
};

inline nlohmann::json to_json(const TheoremReport& r)
{
    nlohmann::json j{{"theorem", r.theorem},
                     {"instance", r.instance},
                     {"verdict", to_string(r.verdict)},
                     {"witness", r.witness}};
    j["scheme"] = r.scheme ? nlohmann::json(std::string(to_string(*r.scheme))) : nlohmann::json(nullptr);
    j["tau_grid"] = r.tau_grid;
    return j;
}

inline std::string describe(const Instance& inst)
{
    return "|X|=" + std::to_string(inst.num_inputs()) + " |Y|=" + std::to_string(inst.num_outputs());
}

/// Keeps grid values in (0, 1], sorted descending; throws GridEmpty if none remain.
inline std::vector<double> theorem_tau_grid(std::span<const double> grid)
{
    std::vector<double> g;
    for (double t : grid)
        if (t > 0.0 && t <= 1.0)
            g.push_back(t);
    if (g.empty())
        throw Error(Errc::GridEmpty, "no temperature in (0, 1] was supplied");
    std::sort(g.begin(), g.end(), std::greater<>());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

namespace detail {

inline std::vector<double> expert_rewards(std::span<const Policy> experts, const Instance& inst)
{
    std::vector<double> out;
    for (const Policy& e : experts)
        out.push_back(expected_reward(e, inst));
    return out;
}

struct GridScan {
    std::vector<double> rewards;     // R(f_tau) per grid point (descending tau)
    std::optional<double> tau_star;  // largest tau with every grid tau' <= tau transcending
};

/// Evaluates R(temper(learner, tau)) over a descending grid and finds tau*.
inline GridScan scan_grid(const Policy& learner, std::span<const double> grid, TemperScheme scheme,
                          const Instance& inst, double baseline)
{
    GridScan scan;
    for (double t : grid)
        scan.rewards.push_back(expected_reward(temper(learner, Temperature(t), scheme, inst.reward()), inst));
    for (std::size_t i = grid.size(); i-- > 0;) {
        if (classify_gap(scan.rewards[i] - baseline) != GapClass::Transcends)
            break;
        scan.tau_star = grid[i];
    }
    return scan;
}

} // namespace detail

/// R(f_bar) equals the mean expert reward and never exceeds the best expert.
inline TheoremReport verify_theorem1(const Instance& inst, std::span<const Policy> experts)
{
    const Policy learner = mixture_policy(experts);
    const auto rewards = detail::expert_rewards(experts, inst);
    const double r_mix = expected_reward(learner, inst);
    const double mean = stats::mean(rewards);
    const double best = *std::max_element(rewards.begin(), rewards.end());
    const bool linear = std::abs(r_mix - mean) <= 1e-12;
    const bool bounded = r_mix <= best + 1e-12;

    TheoremReport rep;
    rep.theorem = 1;
    rep.instance = describe(inst) + " k=" + std::to_string(experts.size());
    rep.verdict = linear && bounded ? Verdict::Holds : Verdict::Violated;
    rep.witness = {{"expert_rewards", rewards},
                   {"mixture_reward", r_mix},
                   {"mean_expert_reward", mean},
                   {"max_expert_reward", best},
                   {"gap", r_mix - best},
                   {"linearity_error", std::abs(r_mix - mean)}};
    return rep;
}

/// R(f_max) > max_i R(f_i) iff every grid tau' at or below some tau* transcends.
inline TheoremReport verify_theorem2(const Instance& inst, std::span<const Policy> experts,
                                     std::span<const double> tau_grid, TemperScheme scheme)
{
    const auto grid = theorem_tau_grid(tau_grid);
    const Policy learner = mixture_policy(experts);
    const auto rewards = detail::expert_rewards(experts, inst);
    const double best = *std::max_element(rewards.begin(), rewards.end());
    const double r_max = expected_reward(temper(learner, Temperature::zero(), scheme, inst.reward()), inst);
    const bool argmax_transcends = classify_gap(r_max - best) == GapClass::Transcends;
    const auto scan = detail::scan_grid(learner, grid, scheme, inst, best);
    const bool smallest_transcends = classify_gap(scan.rewards.back() - best) == GapClass::Transcends;

    TheoremReport rep;
    rep.theorem = 2;
    rep.instance = describe(inst) + " k=" + std::to_string(experts.size());
    rep.scheme = scheme;
    rep.tau_grid = grid;
    rep.verdict = argmax_transcends == smallest_transcends ? Verdict::Holds : Verdict::Violated;
    rep.witness = {{"expert_rewards", rewards},
                   {"max_expert_reward", best},
                   {"argmax_reward", r_max},
                   {"argmax_transcends", argmax_transcends},
                   {"direction", argmax_transcends ? "forward" : "reverse"},
                   {"grid_rewards", scan.rewards}};
    rep.witness["tau_star"] = scan.tau_star ? nlohmann::json(*scan.tau_star) : nlohmann::json(nullptr);
    return rep;
}

/// A single noisy expert f_rho is beaten by its own low-temperature fit, and
/// R(f_tau) approaches R(f*) as tau -> 0.
inline TheoremReport verify_theorem3(const Instance& inst, std::span<const double> rho_list,
                                     std::span<const double> tau_grid, TemperScheme scheme,
                                     double limit_tol = 1e-6)
{
    const auto grid = theorem_tau_grid(tau_grid);
    const RewardTable& table = inst.reward();
    const double r_star = expected_reward(optimal_expert(table), inst);
    double mean_reward = 0.0;
    for (std::size_t x = 0; x < inst.num_inputs(); ++x)
        mean_reward += inst.p_test()[x] * table.row_mean(x);

    TheoremReport rep;
    rep.theorem = 3;
    rep.instance = describe(inst);
    rep.scheme = scheme;
    rep.tau_grid = grid;
    nlohmann::json per_rho = nlohmann::json::array();
    bool all_hold = true;
    for (double rho : rho_list) {
        const Policy expert = noisy_expert(table, rho);
        const Policy experts[] = {expert};
        const Policy learner = mixture_policy(experts);
        const double fit_error = sup_distance(learner, expert);
        const double r_rho = expected_reward(expert, inst);
        const double closed_form = (1.0 - rho) * r_star + rho * mean_reward;
        const auto scan = detail::scan_grid(learner, grid, scheme, inst, r_rho);
        const double limit_error = std::abs(scan.rewards.back() - r_star);
        const bool ok = fit_error <= 1e-15 && std::abs(r_rho - closed_form) <= 1e-12 && scan.tau_star.has_value()
            && limit_error <= limit_tol;
        all_hold = all_hold && ok;
        nlohmann::json w{{"rho", rho},
                         {"holds", ok},
                         {"expert_reward", r_rho},
                         {"closed_form_expert_reward", closed_form},
                         {"optimal_reward", r_star},
                         {"smallest_tau_reward", scan.rewards.back()},
                         {"smallest_tau_gap", scan.rewards.back() - r_rho},
                         {"limit_error", limit_error},
                         {"fit_error", fit_error}};
        w["tau_star"] = scan.tau_star ? nlohmann::json(*scan.tau_star) : nlohmann::json(nullptr);
        per_rho.push_back(std::move(w));
    }
    rep.verdict = all_hold ? Verdict::Holds : Verdict::Violated;
    rep.witness = {{"per_rho", std::move(per_rho)}};
    return rep;
}

/// Partition experts: transcendence at low temperature when p_test touches at
/// least two cells; only a tie with the matching expert when it touches one.
inline TheoremReport verify_theorem4(const RewardTable& table, const Dist& p, const Partition& partition,
                                     std::span<const Dist> p_test_cases, std::span<const double> tau_grid,
                                     TemperScheme scheme)
{
    const auto grid = theorem_tau_grid(tau_grid);
    const auto cell = partition_cells(partition, table.num_inputs());
    const auto experts = partition_experts(table, partition);
    const Policy learner = mixture_policy(experts);

    bool has_multi = false;
    bool has_single = false;
    std::vector<std::vector<std::size_t>> populated_per_case;
    for (const Dist& pt : p_test_cases) {
        if (pt.size() != table.num_inputs())
            throw Error(Errc::DimensionMismatch, "p_test case does not cover |X|");
        std::vector<double> mass(partition.size(), 0.0);
        for (std::size_t x = 0; x < pt.size(); ++x)
            mass[cell[x]] += pt[x];
        std::vector<std::size_t> populated;
        for (std::size_t i = 0; i < mass.size(); ++i)
            if (mass[i] > 0.0)
                populated.push_back(i);
        has_multi = has_multi || populated.size() >= 2;
        has_single = has_single || populated.size() == 1;
        populated_per_case.push_back(std::move(populated));
    }
    if (!has_multi || !has_single)
        throw Error(Errc::InvalidInstance, "need at least one multi-cell and one single-cell p_test case");

    TheoremReport rep;
    rep.theorem = 4;
    rep.instance = "|X|=" + std::to_string(table.num_inputs()) + " |Y|=" + std::to_string(table.num_outputs())
        + " k=" + std::to_string(partition.size());
    rep.scheme = scheme;
    rep.tau_grid = grid;
    nlohmann::json cases = nlohmann::json::array();
    bool all_hold = true;
    for (std::size_t c = 0; c < p_test_cases.size(); ++c) {
        const Instance inst(table, p, p_test_cases[c]);
        const auto rewards = detail::expert_rewards(experts, inst);
        const double best = *std::max_element(rewards.begin(), rewards.end());
        const double r_max = expected_reward(temper(learner, Temperature::zero(), scheme, table), inst);
        const auto scan = detail::scan_grid(learner, grid, scheme, inst, best);
        const double gap = scan.rewards.back() - best;
        const auto& populated = populated_per_case[c];
        bool ok;
        nlohmann::json w{{"populated_cells", populated},
                         {"expert_rewards", rewards},
                         {"max_expert_reward", best},
                         {"argmax_reward", r_max},
                         {"smallest_tau_gap", gap},
                         {"gap_class", to_string(classify_gap(gap))}};
        if (populated.size() >= 2) {
            ok = classify_gap(gap) == GapClass::Transcends;
        } else {
            const double matching = rewards[populated.front()];
            ok = gap <= kStrictEps && std::abs(r_max - matching) <= kStrictEps;
            w["matching_expert_reward"] = matching;
        }
        w["holds"] = ok;
        w["tau_star"] = scan.tau_star ? nlohmann::json(*scan.tau_star) : nlohmann::json(nullptr);
        all_hold = all_hold && ok;
        cases.push_back(std::move(w));
    }
    rep.verdict = all_hold ? Verdict::Holds : Verdict::Violated;
    rep.witness = {{"cases", std::move(cases)}};
    return rep;
}

// ---------------------------------------------------------------------------
// Favor analysis

struct FavorSample {
    std::size_t state_id = 0;
    double favor = 0.0;
    double baseline = 0.0;
    double intervention = 0.0;
    std::size_t n = 0;  // counterfactual draws; 0 in exact mode
};

enum class FavorMode { Exact, Sampled };

constexpr std::string_view to_string(FavorMode m) noexcept { return m == FavorMode::Exact ? "exact" : "sampled"; }

/// F(f', f; x) = E_{y~f'} r(x, y) - E_{y~f} r(x, y). Sampled mode estimates the
/// baseline term from `counterfactual_n` draws of f(.|x).
inline FavorSample favor_pointwise(const Dist& intervention, const Dist& baseline, std::span<const double> rewards,
                                   std::size_t state_id, FavorMode mode, std::size_t counterfactual_n, Rng& rng)
{
    FavorSample s;
    s.state_id = state_id;
    s.intervention = state_reward(intervention, rewards);
    if (mode == FavorMode::Exact) {
        s.baseline = state_reward(baseline, rewards);
    } else {
        if (counterfactual_n == 0)
            throw Error(Errc::IndexOutOfRange, "sampled favor needs counterfactual_n >= 1");
        double acc = 0.0;
        for (std::size_t i = 0; i < counterfactual_n; ++i)
            acc += rewards[rng.categorical(baseline.probs())];
        s.baseline = acc / static_cast<double>(counterfactual_n);
        s.n = counterfactual_n;
    }
    s.favor = s.intervention - s.baseline;
    return s;
}

inline FavorSample favor_pointwise(const Policy& intervention, const Policy& baseline, std::size_t x,
                                   const RewardTable& table, FavorMode mode, std::size_t counterfactual_n, Rng& rng)
{
    return favor_pointwise(intervention(x), baseline(x), table.row(x), x, mode, counterfactual_n, rng);
}

struct FavorOptions {
    FavorMode mode = FavorMode::Exact;
    std::size_t counterfactual_n = 100;
    std::size_t bootstrap_resamples = 10000;
    double ci_level = 0.95;
    double hist_lo = -0.3;
    double hist_hi = 0.3;
    std::size_t hist_bins = 61;
};

struct FavorDistribution {
    std::vector<FavorSample> samples;
    double mean = 0.0;
    stats::Interval mean_ci;
    double median = 0.0;
    stats::Histogram histogram{-0.3, 0.3, 61};
};

/// Summarizes favor samples: mean with percentile-bootstrap CI, median, histogram.
inline FavorDistribution summarize_favor(std::vector<FavorSample> samples, const FavorOptions& opt, Rng& rng)
{
    if (samples.empty())
        throw Error(Errc::EmptyStateList, "no visited states");
    FavorDistribution out;
    out.histogram = stats::Histogram(opt.hist_lo, opt.hist_hi, opt.hist_bins);
    std::vector<double> favors;
    favors.reserve(samples.size());
    for (const FavorSample& s : samples) {
        favors.push_back(s.favor);
        out.histogram.add(s.favor);
    }
    out.mean = stats::mean(favors);
    out.median = stats::median(favors);
    out.mean_ci = stats::bootstrap_mean_ci(favors, opt.bootstrap_resamples, opt.ci_level, rng);
    out.samples = std::move(samples);
    return out;
}

inline FavorDistribution favor_distribution(const Policy& intervention, const Policy& baseline,
                                            std::span<const std::size_t> visited_states, const RewardTable& table,
                                            const FavorOptions& opt, Rng& rng)
{
    if (visited_states.empty())
        throw Error(Errc::EmptyStateList, "no visited states");
    std::vector<FavorSample> samples;
    samples.reserve(visited_states.size());
    for (std::size_t x : visited_states)
        samples.push_back(favor_pointwise(intervention, baseline, x, table, opt.mode, opt.counterfactual_n, rng));
    return summarize_favor(std::move(samples), opt, rng);
}

inline nlohmann::json summary_json(const FavorDistribution& d)
{
    std::vector<double> edges;
    for (std::size_t i = 0; i <= d.histogram.counts.size(); ++i)
        edges.push_back(d.histogram.bin_low(i));
    return {{"n", d.samples.size()},
            {"mean", d.mean},
            {"ci_low", d.mean_ci.low},
            {"ci_high", d.mean_ci.high},
            {"median", d.median},
            {"histogram", {{"lo", d.histogram.lo}, {"hi", d.histogram.hi}, {"edges", edges}, {"counts", d.histogram.counts}}}};
}

} // namespace transcend
