#pragma once

// Experiment runners behind the command-line tool. Each run takes a resolved
// config and returns the bundle of files it would write.

#include <transcend/chess/dataset.hpp>
#include <transcend/chess/tokenizer.hpp>
#include <transcend/engine/match.hpp>
#include <transcend/engine/mock_engine.hpp>
#include <transcend/glicko2.hpp>
#include <transcend/parallel.hpp>
#include <transcend/report.hpp>
#include <transcend/rewardlab.hpp>
#include <transcend/tictactoe.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#ifndef TRANSCEND_VERSION
#define TRANSCEND_VERSION "0.1.0"
#endif

namespace transcend::experiments {

using nlohmann::json;

inline constexpr std::string_view kVersion = TRANSCEND_VERSION;

/// Output files of one run, in write order.
struct Bundle {
    std::vector<std::pair<std::string, std::string>> files;
    bool ok = true;  // false when a checked property did not hold

    void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }

    const std::string& get(std::string_view name) const
    {
        for (const auto& [n, c] : files)
            if (n == name)
                return c;
        throw Error(Errc::ConfigError, "no output named " + std::string(name));
    }

    void write(const std::filesystem::path& dir) const
    {
        for (const auto& [name, content] : files)
            report::write_file(dir / name, content);
    }
};

// ---------------------------------------------------------------------------
// Config reading

/// Reads keys from a JSON object, keeping defaults for absent keys and
/// rejecting keys nobody asked for.
class ConfigReader {
public:
    explicit ConfigReader(const json& j) : j_(j)
    {
        if (!j_.is_object())
            throw Error(Errc::ConfigError, "config must be a JSON object");
    }

    template <class T>
    ConfigReader& get(const char* key, T& out)
    {
        used_.insert(key);
        if (auto it = j_.find(key); it != j_.end()) {
            try {
                out = it->template get<T>();
            } catch (const json::exception& e) {
                throw Error(Errc::ConfigError, std::string("config key '") + key + "': " + e.what());
            }
        }
        return *this;
    }

    ConfigReader& scheme(const char* key, TemperScheme& out)
    {
        std::string s(to_string(out));
        get(key, s);
        const auto parsed = parse_temper_scheme(s);
        if (!parsed)
            throw Error(Errc::ConfigError, "unknown temper scheme: " + s);
        out = *parsed;
        return *this;
    }

    ConfigReader& period(const char* key, glicko2::PeriodMode& out)
    {
        std::string s(glicko2::to_string(out));
        get(key, s);
        out = glicko2::parse_period_mode(s);
        return *this;
    }

    void finish() const
    {
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k))
                throw Error(Errc::ConfigError, "unknown config key: " + k);
    }

private:
    const json& j_;
    std::set<std::string> used_;
};

inline json meta(std::uint64_t seed, const json& config, std::optional<TemperScheme> scheme = std::nullopt)
{
    json m{{"version", std::string(kVersion)}, {"seed", seed}, {"config", config}};
    m["scheme"] = scheme ? json(std::string(to_string(*scheme))) : json(nullptr);
    return m;
}

inline std::string num(double v) { return report::format_number(v); }

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw Error(Errc::ConfigError, what);
}

// ---------------------------------------------------------------------------
// Theorem suites

struct TheoremsConfig {
    std::uint64_t seed = 1;
    std::size_t theorem1_instances = 1000;
    std::size_t theorem2_instances = 200;
    std::size_t theorem3_instances = 100;
    std::size_t theorem4_instances = 100;
    std::size_t max_inputs = 20;
    std::size_t max_outputs = 10;
    std::size_t max_experts = 5;
    std::vector<double> tau_grid = default_tau_grid();
    std::vector<double> rhos{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    TemperScheme scheme = TemperScheme::PowerOnProbs;
    double limit_tolerance = 1e-6;
    std::size_t workers = 1;

    static TheoremsConfig from_json(const json& j)
    {
        TheoremsConfig c;
        ConfigReader r(j);
        r.get("seed", c.seed)
            .get("theorem1_instances", c.theorem1_instances)
            .get("theorem2_instances", c.theorem2_instances)
            .get("theorem3_instances", c.theorem3_instances)
            .get("theorem4_instances", c.theorem4_instances)
            .get("max_inputs", c.max_inputs)
            .get("max_outputs", c.max_outputs)
            .get("max_experts", c.max_experts)
            .get("tau_grid", c.tau_grid)
            .get("rhos", c.rhos)
            .scheme("scheme", c.scheme)
            .get("limit_tolerance", c.limit_tolerance)
            .get("workers", c.workers);
        r.finish();
        c.validate();
        return c;
    }

    void validate() const
    {
        require(max_inputs >= 2, "max_inputs must be at least 2");
        require(max_outputs >= 2, "max_outputs must be at least 2");
        require(max_experts >= 2, "max_experts must be at least 2");
        for (double rho : rhos)
            require(rho > 0.0 && rho < 1.0, "every rho must lie in (0, 1)");
        // Theorems 2-4 quantify over temperatures in (0, 1).
        theorem_tau_grid(tau_grid);
    }

    json to_json() const
    {
        return {{"seed", seed},
                {"theorem1_instances", theorem1_instances},
                {"theorem2_instances", theorem2_instances},
                {"theorem3_instances", theorem3_instances},
                {"theorem4_instances", theorem4_instances},
                {"max_inputs", max_inputs},
                {"max_outputs", max_outputs},
                {"max_experts", max_experts},
                {"tau_grid", tau_grid},
                {"rhos", rhos},
                {"scheme", std::string(to_string(scheme))},
                {"limit_tolerance", limit_tolerance},
                {"workers", workers}};
    }
};

/// One theorem checked over many seeded cases.
struct SuiteResult {
    int theorem = 0;
    std::size_t cases = 0;
    std::size_t held = 0;
    std::optional<TheoremReport> first_violation;
    TheoremReport example;

    bool holds() const noexcept { return held == cases; }
};

inline json to_json(const SuiteResult& s)
{
    json j{{"theorem", s.theorem},
           {"cases", s.cases},
           {"held", s.held},
           {"verdict", s.holds() ? "holds" : "violated"},
           {"example", to_json(s.example)}};
    j["first_violation"] = s.first_violation ? to_json(*s.first_violation) : json(nullptr);
    return j;
}

namespace detail {

inline bool unique_row_maxima(const RewardTable& t)
{
    for (std::size_t x = 0; x < t.num_inputs(); ++x) {
        const auto row = t.row(x);
        const double m = *std::max_element(row.begin(), row.end());
        if (std::count(row.begin(), row.end(), m) != 1)
            return false;
    }
    return true;
}

inline Instance unique_max_instance(Rng& rng, std::size_t nx, std::size_t ny)
{
    while (true) {
        Instance inst = random_instance(rng, nx, ny);
        if (unique_row_maxima(inst.reward()))
            return inst;
    }
}

/// p_test concentrated on the given partition cells with random weights.
inline Dist cells_dist(Rng& rng, const Partition& part, std::span<const std::size_t> cells, std::size_t nx)
{
    std::vector<double> w(nx, 0.0);
    for (std::size_t c : cells)
        for (std::size_t x : part[c])
            w[x] = 0.1 + rng.uniform();
    return normalize(w);
}

template <class Make>
SuiteResult run_suite(int theorem, std::size_t n, std::uint64_t seed, std::size_t workers, Make make)
{
    std::vector<std::optional<TheoremReport>> reports(n);
    parallel_for(n, workers, [&](std::size_t i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(theorem) * 1000003ULL + i));
        reports[i] = make(rng);
    });
    SuiteResult s;
    s.theorem = theorem;
    s.cases = n;
    for (auto& r : reports) {
        if (r->holds())
            ++s.held;
        else if (!s.first_violation)
            s.first_violation = *r;
    }
    if (n > 0)
        s.example = *reports.front();
    return s;
}

} // namespace detail

inline SuiteResult theorem1_suite(const TheoremsConfig& c)
{
    return detail::run_suite(1, c.theorem1_instances, c.seed, c.workers, [&](Rng& rng) {
        const std::size_t nx = 1 + rng.below(c.max_inputs);
        const std::size_t ny = 2 + rng.below(c.max_outputs - 1);
        const Instance inst = random_instance(rng, nx, ny);
        const std::size_t k = 1 + rng.below(c.max_experts);
        std::vector<Policy> experts;
        for (std::size_t i = 0; i < k; ++i)
            experts.push_back(random_policy(rng, nx, ny, "expert" + std::to_string(i), rng.below(3) == 0));
        return verify_theorem1(inst, experts);
    });
}

inline SuiteResult theorem2_suite(const TheoremsConfig& c)
{
    return detail::run_suite(2, c.theorem2_instances, c.seed, c.workers, [&](Rng& rng) {
        const std::size_t nx = 2 + rng.below(c.max_inputs - 1);
        const std::size_t ny = 2 + rng.below(c.max_outputs - 1);
        const Instance inst = random_instance(rng, nx, ny);
        std::vector<Policy> experts;
        if (rng.below(2) == 0) {
            const std::size_t cells = 2 + rng.below(std::min(c.max_experts, nx) - 1);
            experts = partition_experts(inst, random_partition(rng, nx, cells));
        } else {
            const std::size_t k = 2 + rng.below(c.max_experts - 1);
            for (std::size_t i = 0; i < k; ++i)
                experts.push_back(random_policy(rng, nx, ny, "expert" + std::to_string(i)));
        }
        return verify_theorem2(inst, experts, c.tau_grid, c.scheme);
    });
}

inline SuiteResult theorem3_suite(const TheoremsConfig& c)
{
    return detail::run_suite(3, c.theorem3_instances, c.seed, c.workers, [&](Rng& rng) {
        const std::size_t nx = 1 + rng.below(c.max_inputs);
        const std::size_t ny = 2 + rng.below(c.max_outputs - 1);
        return verify_theorem3(detail::unique_max_instance(rng, nx, ny), c.rhos, c.tau_grid, c.scheme, c.limit_tolerance);
    });
}

inline SuiteResult theorem4_suite(const TheoremsConfig& c)
{
    return detail::run_suite(4, c.theorem4_instances, c.seed, c.workers, [&](Rng& rng) {
        const std::size_t nx = 2 + rng.below(c.max_inputs - 1);
        const std::size_t ny = 2 + rng.below(c.max_outputs - 1);
        const RewardTable table = random_reward_table(rng, nx, ny);
        const std::size_t cells = 2 + rng.below(std::min<std::size_t>({5, c.max_experts, nx}) - 1);
        const Partition part = random_partition(rng, nx, cells);
        const std::size_t a = rng.below(cells);
        std::size_t b = rng.below(cells - 1);
        if (b >= a)
            ++b;
        const std::size_t two[] = {a, b};
        const std::size_t one[] = {rng.below(cells)};
        const std::vector<Dist> cases{detail::cells_dist(rng, part, two, nx), detail::cells_dist(rng, part, one, nx)};
        return verify_theorem4(table, random_dist(rng, nx), part, cases, c.tau_grid, c.scheme);
    });
}

inline Bundle run_theorems(const TheoremsConfig& c)
{
    c.validate();
    const SuiteResult suites[] = {theorem1_suite(c), theorem2_suite(c), theorem3_suite(c), theorem4_suite(c)};
    Bundle b;
    json reports = json::array();
    report::CsvTable table({"theorem", "cases", "held", "verdict"});
    for (const SuiteResult& s : suites) {
        reports.push_back(to_json(s));
        table.row({std::to_string(s.theorem), std::to_string(s.cases), std::to_string(s.held), s.holds() ? "holds" : "violated"});
        b.ok = b.ok && s.holds();
    }
    b.add("theorems.json", report::json_text({{"meta", meta(c.seed, c.to_json(), c.scheme)}, {"reports", reports}}));
    b.add("theorems.csv", table.str());
    return b;
}

// ---------------------------------------------------------------------------
// Tic-tac-toe rating demo

struct DemoConfig {
    std::uint64_t seed = 1;
    std::vector<double> cohort{0.5, 0.7};
    std::vector<double> tau_grid{1.5, 1.0, 0.75, 0.5, 0.25, 0.1, 0.05, 0.01, 0.005, 0.001};
    TemperScheme scheme = TemperScheme::PowerOnProbs;
    std::size_t games = 2000;
    std::vector<double> anchor_rhos{1.0, 0.4, 0.0};  // 1 is the uniform player, 0 the perfect one
    double anchor_rd = 30.0;
    double base_rating = 1000.0;
    double reference_rho = 1.0;
    double system_tau = glicko2::kDefaultSystemTau;
    glicko2::PeriodMode period = glicko2::PeriodMode::Single;
    std::size_t workers = 1;

    static DemoConfig from_json(const json& j)
    {
        DemoConfig c;
        ConfigReader r(j);
        r.get("seed", c.seed)
            .get("cohort", c.cohort)
            .get("tau_grid", c.tau_grid)
            .scheme("scheme", c.scheme)
            .get("games", c.games)
            .get("anchor_rhos", c.anchor_rhos)
            .get("anchor_rd", c.anchor_rd)
            .get("base_rating", c.base_rating)
            .get("reference_rho", c.reference_rho)
            .get("system_tau", c.system_tau)
            .period("period_mode", c.period)
            .get("workers", c.workers);
        r.finish();
        c.validate();
        return c;
    }

    void validate() const
    {
        require(!cohort.empty(), "cohort must not be empty");
        for (double rho : cohort)
            require(rho > 0.0 && rho < 1.0, "cohort rho must lie in (0, 1)");
        require(!tau_grid.empty(), "tau_grid must not be empty");
        for (double t : tau_grid)
            require(t > 0.0 && std::isfinite(t), "temperatures must be positive");
        require(games >= 1, "games must be at least 1");
        require(!anchor_rhos.empty(), "need at least one anchor");
        for (double rho : anchor_rhos)
            require(rho >= 0.0 && rho <= 1.0, "anchor rho must lie in [0, 1]");
        require(reference_rho >= 0.0 && reference_rho <= 1.0, "reference_rho must lie in [0, 1]");
        require(anchor_rd > 0.0 && anchor_rd <= glicko2::kMaxRd, "anchor_rd must lie in (0, 500]");
    }

    json to_json() const
    {
        return {{"seed", seed},
                {"cohort", cohort},
                {"tau_grid", tau_grid},
                {"scheme", std::string(to_string(scheme))},
                {"games", games},
                {"anchor_rhos", anchor_rhos},
                {"anchor_rd", anchor_rd},
                {"base_rating", base_rating},
                {"reference_rho", reference_rho},
                {"system_tau", system_tau},
                {"period_mode", std::string(glicko2::to_string(period))},
                {"workers", workers}};
    }
};

/// The tic-tac-toe player at noise level rho: 1 uniform, 0 perfect.
inline Policy ttt_player(double rho)
{
    if (rho >= 1.0)
        return ttt::uniform_player();
    if (rho <= 0.0)
        return ttt::perfect_player();
    const double r[] = {rho};
    return ttt::build_expert_cohort(r).front();
}

struct Anchor {
    Policy policy;
    double rho = 0.0;
    glicko2::Rating rating;
};

/// Anchor ratings from exact scores against the reference player, which sits
/// at base_rating: r = base + (scale / g(phi_ref)) ln(s / (1 - s)).
inline std::vector<Anchor> calibrate_anchors(const DemoConfig& c)
{
    const Policy reference = ttt_player(c.reference_rho);
    const double phi = c.anchor_rd / glicko2::kScale;
    std::vector<Anchor> out;
    for (double rho : c.anchor_rhos) {
        Policy p = ttt_player(rho);
        const double s = std::clamp(ttt::expected_score(p, reference), 1e-6, 1.0 - 1e-6);
        const double rating = c.base_rating + glicko2::kScale / glicko2::g(phi) * std::log(s / (1.0 - s));
        out.push_back({std::move(p), rho, {rating, c.anchor_rd, 0.06}});
    }
    return out;
}

struct RatedPlayer {
    std::string label;
    glicko2::AnchoredRating rating;
    std::vector<glicko2::AnchorResult> results;
    double exact_score = 0.0;  // vs the reference player, exact
};

/// Plays `games` games against the anchors in rotation, alternating seats, and
/// rates the candidate from its prior. Game i draws from the same stream for
/// every candidate, so identical policies get identical records.
inline RatedPlayer rate_ttt_player(const Policy& candidate, const std::vector<Anchor>& anchors, const DemoConfig& c)
{
    RatedPlayer out;
    out.label = candidate.label();
    for (const Anchor& a : anchors)
        out.results.push_back({a.rating});
    const std::uint64_t seed = derive_seed(c.seed, 0);
    for (std::size_t i = 0; i < c.games; ++i) {
        const std::size_t a = i % anchors.size();
        const bool as_x = (i / anchors.size()) % 2 == 0;
        Rng rng(derive_seed(seed, i));
        const auto t = as_x ? ttt::rollout(candidate, anchors[a].policy, rng) : ttt::rollout(anchors[a].policy, candidate, rng);
        const double s = ttt::score_for(t.outcome, as_x ? ttt::Side::X : ttt::Side::O);
        (s == 1.0 ? out.results[a].wins : s == 0.0 ? out.results[a].losses : out.results[a].draws) += 1;
    }
    out.rating = glicko2::rate_anchored(out.results, c.period, c.system_tau);
    out.exact_score = ttt::expected_score(candidate, ttt_player(c.reference_rho));
    return out;
}

struct DemoResult {
    std::vector<Anchor> anchors;
    std::vector<RatedPlayer> experts;
    RatedPlayer cohort_average;
    std::vector<std::pair<double, RatedPlayer>> tempered;  // in tau_grid order

    double combined_rd(const RatedPlayer& a, const RatedPlayer& b) const
    {
        return std::hypot(a.rating.rating.rd, b.rating.rating.rd);
    }

    /// Rating above every expert by more than 2 combined RD, and exact score above every expert.
    bool transcends(const RatedPlayer& p) const
    {
        for (const auto& e : experts)
            if (!(p.rating.rating.rating - e.rating.rating.rating > 2.0 * combined_rd(p, e)) || !(p.exact_score > e.exact_score))
                return false;
        return true;
    }
};

inline DemoResult demo_ratings(const DemoConfig& c)
{
    c.validate();
    DemoResult r;
    r.anchors = calibrate_anchors(c);
    const auto& table = ttt::game().table();
    const std::vector<Policy> cohort = ttt::build_expert_cohort(c.cohort);
    const Policy mixture = mixture_policy(cohort).relabeled("cohort_average");

    std::vector<Policy> candidates = cohort;
    candidates.push_back(mixture);
    for (double tau : c.tau_grid)
        candidates.push_back(temper(mixture, Temperature(tau), c.scheme, table));
    std::vector<RatedPlayer> rated(candidates.size());
    parallel_for(candidates.size(), c.workers,
                 [&](std::size_t i) { rated[i] = rate_ttt_player(candidates[i], r.anchors, c); });

    r.experts.assign(rated.begin(), rated.begin() + static_cast<std::ptrdiff_t>(cohort.size()));
    r.cohort_average = rated[cohort.size()];
    for (std::size_t j = 0; j < c.tau_grid.size(); ++j)
        r.tempered.emplace_back(c.tau_grid[j], rated[cohort.size() + 1 + j]);
    return r;
}

inline json to_json(const RatedPlayer& p)
{
    json results = json::array();
    for (const auto& a : p.results)
        results.push_back({{"anchor_rating", a.anchor.rating}, {"wins", a.wins}, {"draws", a.draws}, {"losses", a.losses}});
    return {{"label", p.label}, {"rating", to_json(p.rating)}, {"exact_score", p.exact_score}, {"results", results}};
}

inline Bundle run_demo(const DemoConfig& c)
{
    const DemoResult r = demo_ratings(c);
    Bundle b;

    report::CsvTable ratings({"tau", "rating", "rd", "ci_low", "ci_high"});
    json rows = json::array();
    for (const auto& [tau, p] : r.tempered) {
        ratings.row({num(tau), num(p.rating.rating.rating), num(p.rating.rating.rd), num(p.rating.ci.low), num(p.rating.ci.high)});
        json row = to_json(p);
        row["tau"] = tau;
        row["transcends"] = r.transcends(p);
        rows.push_back(std::move(row));
    }
    report::CsvTable experts({"label", "rho", "rating", "rd", "ci_low", "ci_high"});
    json expert_rows = json::array();
    for (std::size_t i = 0; i < r.experts.size(); ++i) {
        const auto& e = r.experts[i];
        experts.row({e.label, num(c.cohort[i]), num(e.rating.rating.rating), num(e.rating.rating.rd), num(e.rating.ci.low),
                      num(e.rating.ci.high)});
        json row = to_json(e);
        row["rho"] = c.cohort[i];
        expert_rows.push_back(std::move(row));
    }
    json anchors = json::array();
    for (const auto& a : r.anchors)
        anchors.push_back({{"label", a.policy.label()}, {"rho", a.rho}, {"rating", a.rating.rating}, {"rd", a.rating.rd}});

    // The smallest temperature is the one the transcendence claim is about.
    const auto lowest = std::min_element(r.tempered.begin(), r.tempered.end(),
                                         [](const auto& x, const auto& y) { return x.first < y.first; });
    b.ok = r.transcends(lowest->second);
    json summary{{"meta", meta(c.seed, c.to_json(), c.scheme)},
                 {"anchors", anchors},
                 {"experts", expert_rows},
                 {"cohort_average", to_json(r.cohort_average)},
                 {"tempered", rows},
                 {"lowest_tau", lowest->first},
                 {"lowest_tau_transcends", b.ok}};
    b.add("demo_ratings.csv", ratings.str());
    b.add("demo_experts.csv", experts.str());
    b.add("demo.json", report::json_text(summary));
    return b;
}

// ---------------------------------------------------------------------------
// Favor analysis

struct FavorConfig {
    std::uint64_t seed = 1;
    std::string mode = "tictactoe";  // or "chess"
    double intervention_tau = 0.001;
    double baseline_tau = 1.0;
    TemperScheme scheme = TemperScheme::PowerOnProbs;
    std::size_t games = 2000;
    std::string reward = "exact";  // or "sampled"
    std::size_t counterfactual_n = 100;
    std::size_t bootstrap_resamples = 10000;
    double ci_level = 0.95;
    // tic-tac-toe
    std::vector<double> cohort{0.5, 0.7};
    double opponent_rho = 1.0;
    std::string seat = "alternate";
    // chess
    std::string pgn;
    std::string engine_cmd = "mock";
    int skill = 1;
    int movetime_ms = engine::kDefaultMovetimeMs;
    int eval_ms = 1000;
    int max_plies = 60;
    double cp_scale = engine::kDefaultCpScale;

    static FavorConfig from_json(const json& j)
    {
        FavorConfig c;
        ConfigReader r(j);
        r.get("seed", c.seed)
            .get("mode", c.mode)
            .get("intervention_tau", c.intervention_tau)
            .get("baseline_tau", c.baseline_tau)
            .scheme("scheme", c.scheme)
            .get("games", c.games)
            .get("reward", c.reward)
            .get("counterfactual_n", c.counterfactual_n)
            .get("bootstrap_resamples", c.bootstrap_resamples)
            .get("ci_level", c.ci_level)
            .get("cohort", c.cohort)
            .get("opponent_rho", c.opponent_rho)
            .get("seat", c.seat)
            .get("pgn", c.pgn)
            .get("engine_cmd", c.engine_cmd)
            .get("skill", c.skill)
            .get("movetime_ms", c.movetime_ms)
            .get("eval_ms", c.eval_ms)
            .get("max_plies", c.max_plies)
            .get("cp_scale", c.cp_scale);
        r.finish();
        c.validate();
        return c;
    }

    void validate() const
    {
        require(mode == "tictactoe" || mode == "chess", "mode must be tictactoe or chess");
        require(reward == "exact" || reward == "sampled", "reward must be exact or sampled");
        require(intervention_tau > 0.0 && baseline_tau > 0.0, "temperatures must be positive");
        require(games >= 1, "games must be at least 1");
        require(counterfactual_n >= 1, "counterfactual_n must be at least 1");
        require(bootstrap_resamples >= 1, "bootstrap_resamples must be at least 1");
        require(ci_level > 0.0 && ci_level < 1.0, "ci_level must lie in (0, 1)");
        require(seat == "x" || seat == "o" || seat == "alternate", "seat must be x, o or alternate");
        for (double rho : cohort)
            require(rho > 0.0 && rho < 1.0, "cohort rho must lie in (0, 1)");
        require(opponent_rho >= 0.0 && opponent_rho <= 1.0, "opponent_rho must lie in [0, 1]");
        if (mode == "chess")
            require(!pgn.empty(), "chess mode needs a pgn corpus");
    }

    json to_json() const
    {
        json j{{"seed", seed},
               {"mode", mode},
               {"intervention_tau", intervention_tau},
               {"baseline_tau", baseline_tau},
               {"scheme", std::string(to_string(scheme))},
               {"games", games},
               {"reward", reward},
               {"counterfactual_n", counterfactual_n},
               {"bootstrap_resamples", bootstrap_resamples},
               {"ci_level", ci_level}};
        if (mode == "tictactoe") {
            j["cohort"] = cohort;
            j["opponent_rho"] = opponent_rho;
            j["seat"] = seat;
        } else {
            j["pgn"] = pgn;
            j["engine_cmd"] = engine_cmd;
            j["skill"] = skill;
            j["movetime_ms"] = movetime_ms;
            j["eval_ms"] = eval_ms;
            j["max_plies"] = max_plies;
            j["cp_scale"] = cp_scale;
        }
        return j;
    }

    FavorOptions options() const
    {
        FavorOptions o;
        o.mode = reward == "exact" ? FavorMode::Exact : FavorMode::Sampled;
        o.counterfactual_n = counterfactual_n;
        o.bootstrap_resamples = bootstrap_resamples;
        o.ci_level = ci_level;
        return o;
    }
};

struct FavorRun {
    FavorDistribution dist;
    std::size_t excluded = 0;  // states dropped after engine errors
};

inline FavorRun favor_tictactoe(const FavorConfig& c)
{
    const auto& table = ttt::game().table();
    const Policy mixture = mixture_policy(ttt::build_expert_cohort(c.cohort));
    const Policy intervention = temper(mixture, Temperature(c.intervention_tau), c.scheme, table);
    const Policy baseline = temper(mixture, Temperature(c.baseline_tau), c.scheme, table);
    const ttt::Seat seat = c.seat == "x" ? ttt::Seat::X : c.seat == "o" ? ttt::Seat::O : ttt::Seat::Alternate;
    Rng visit_rng(derive_seed(c.seed, 1));
    const auto states = ttt::visitation_sample(intervention, ttt_player(c.opponent_rho), c.games, visit_rng, seat);
    Rng favor_rng(derive_seed(c.seed, 2));
    return {favor_distribution(intervention, baseline, states, table, c.options(), favor_rng), 0};
}

inline std::unique_ptr<engine::UciEngine> open_engine(const std::string& cmd, engine::EngineOptions opt, std::uint64_t salt = 0)
{
    std::unique_ptr<engine::LineChannel> ch;
    if (cmd == "mock") {
        engine::MockEngineOptions m;
        m.salt = salt;
        ch = engine::mock_channel(std::make_shared<engine::MockEngine>(m));
    } else {
        ch = std::make_unique<engine::ProcessChannel>(engine::split_command(cmd));
    }
    return std::make_unique<engine::UciEngine>(std::move(ch), opt);
}

/// Chess favor: a tabular policy fitted to the corpus, sampled at the two
/// temperatures; states come from the low-temperature policy's games against
/// the engine and rewards are the engine's win probability after each move.
inline FavorRun favor_chess(const FavorConfig& c)
{
    const auto parsed = chess::parse_pgn(report::read_file(c.pgn));
    require(!parsed.games.empty(), "no games in " + c.pgn);
    const auto policy = engine::TabularChessPolicy::from_games(parsed.games);
    engine::EngineOptions eo;
    eo.skill = c.skill;
    eo.movetime_ms = c.movetime_ms;
    eo.cp_scale = c.cp_scale;
    auto eng = open_engine(c.engine_cmd, eo);
    const Temperature t_int(c.intervention_tau);
    const Temperature t_base(c.baseline_tau);

    Rng rng(derive_seed(c.seed, 1));
    std::vector<chess::Position> visited;
    for (std::size_t g = 0; g < c.games; ++g) {
        const chess::Color me = g % 2 == 0 ? chess::Color::White : chess::Color::Black;
        chess::Position pos = chess::Position::startpos();
        eng->new_game();
        for (int ply = 0; ply < c.max_plies && !pos.legal_moves().empty(); ++ply) {
            chess::Move m;
            if (pos.side_to_move() == me) {
                visited.push_back(pos);
                m = policy.sample(pos, rng, t_int);
            } else {
                m = eng->best_move(pos);
            }
            pos = pos.apply(m);
        }
    }

    Rng favor_rng(derive_seed(c.seed, 2));
    const FavorOptions opt = c.options();
    FavorRun run{};
    std::vector<FavorSample> samples;
    for (std::size_t i = 0; i < visited.size(); ++i) {
        const chess::Position& pos = visited[i];
        const auto legal = pos.legal_moves();
        const Dist di = policy.distribution(pos, legal, t_int, c.scheme);
        const Dist db = policy.distribution(pos, legal, t_base, c.scheme);
        try {
            std::vector<double> rewards(legal.size(), 0.0);
            for (std::size_t k = 0; k < legal.size(); ++k) {
                if (di[k] == 0.0 && db[k] == 0.0)
                    continue;
                const chess::Position next = pos.apply(legal[k]);
                if (next.is_checkmate())
                    rewards[k] = 1.0;
                else if (next.is_stalemate() || next.insufficient_material())
                    rewards[k] = 0.5;
                else
                    rewards[k] = 1.0 - eng->eval_winprob(next, c.eval_ms).win_prob;
            }
            FavorSample s = favor_pointwise(di, db, rewards, i, opt.mode, opt.counterfactual_n, favor_rng);
            samples.push_back(s);
        } catch (const Error& e) {
            if (e.code() != Errc::EngineTimeout && e.code() != Errc::IllegalEngineMove)
                throw;
            ++run.excluded;
        }
    }
    run.dist = summarize_favor(std::move(samples), opt, favor_rng);
    return run;
}

inline Bundle run_favor(const FavorConfig& c)
{
    c.validate();
    const FavorRun run = c.mode == "tictactoe" ? favor_tictactoe(c) : favor_chess(c);
    const FavorDistribution& d = run.dist;
    Bundle b;
    report::CsvTable samples({"state_id", "favor", "baseline", "intervention", "n"});
    for (const FavorSample& s : d.samples)
        samples.row({std::to_string(s.state_id), num(s.favor), num(s.baseline), num(s.intervention), std::to_string(s.n)});
    report::CsvTable hist({"bin_low", "bin_high", "count"});
    for (std::size_t i = 0; i < d.histogram.counts.size(); ++i)
        hist.row({num(d.histogram.bin_low(i)), num(d.histogram.bin_low(i + 1)), std::to_string(d.histogram.counts[i])});
    json summary = summary_json(d);
    summary["excluded_states"] = run.excluded;
    summary["mean_ci_above_zero"] = d.mean_ci.low > 0.0;
    summary["median_below_mean"] = d.median < d.mean;
    b.add("favor.csv", samples.str());
    b.add("favor_histogram.csv", hist.str());
    b.add("favor.json", report::json_text({{"meta", meta(c.seed, c.to_json(), c.scheme)}, {"summary", summary}}));
    return b;
}

// ---------------------------------------------------------------------------
// Dataset diversity

struct DiversityConfig {
    std::uint64_t seed = 1;
    std::vector<std::string> pgn;  // empty: generate synthetic corpora
    std::vector<long long> cutoffs;
    std::size_t min_count = 30;
    std::vector<double> rhos{0.8, 0.5, 0.2};
    std::size_t styles = 4;
    std::size_t games = 1000;
    int max_plies = 12;
    bool write_pgn = false;

    static DiversityConfig from_json(const json& j)
    {
        DiversityConfig c;
        ConfigReader r(j);
        r.get("seed", c.seed)
            .get("pgn", c.pgn)
            .get("cutoffs", c.cutoffs)
            .get("min_count", c.min_count)
            .get("rhos", c.rhos)
            .get("styles", c.styles)
            .get("games", c.games)
            .get("max_plies", c.max_plies)
            .get("write_pgn", c.write_pgn);
        r.finish();
        c.validate();
        return c;
    }

    void validate() const
    {
        require(min_count >= 2, "min_count must be at least 2");
        for (long long cut : cutoffs)
            require(cut > 0, "cutoffs must be positive");
        if (pgn.empty()) {
            require(!rhos.empty(), "need at least one synthetic cohort");
            for (double rho : rhos)
                require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
            require(styles >= 1, "styles must be at least 1");
            require(games >= 1, "games must be at least 1");
            require(max_plies >= 1, "max_plies must be at least 1");
        } else {
            require(!cutoffs.empty(), "cutoffs are required with pgn input");
        }
    }

    json to_json() const
    {
        json j{{"seed", seed}, {"cutoffs", cutoffs}, {"min_count", min_count}};
        if (pgn.empty()) {
            j["rhos"] = rhos;
            j["styles"] = styles;
            j["games"] = games;
            j["max_plies"] = max_plies;
            j["write_pgn"] = write_pgn;
        } else {
            j["pgn"] = pgn;
        }
        return j;
    }
};

/// Synthetic ratings: noisier cohorts get lower Elo tags.
inline int synthetic_elo(double rho) { return static_cast<int>(std::lround(2400.0 - 1600.0 * rho)); }

struct CorpusStats {
    std::string label;
    double rho = 0.0;
    int elo = 0;
    std::size_t games = 0;
    std::size_t n_states = 0;
    std::optional<double> mean_entropy;
};

inline std::vector<chess::PgnGame> synthetic_corpus(const DiversityConfig& c, std::size_t index)
{
    const double rho = c.rhos[index];
    std::vector<chess::NoisyChessPlayer> cohort;
    for (std::size_t s = 0; s < c.styles; ++s)
        cohort.push_back({rho, derive_seed(c.seed, 1000 * (index + 1) + s)});
    chess::CorpusOptions opt;
    opt.games = c.games;
    opt.max_plies = c.max_plies;
    opt.white_elo = opt.black_elo = synthetic_elo(rho);
    Rng rng(derive_seed(c.seed, index));
    return chess::generate_cohort_corpus(cohort, opt, rng);
}

inline std::pair<std::size_t, std::optional<double>> entropy_or_empty(std::span<const chess::PgnGame> games, std::size_t min_count)
{
    try {
        const auto r = chess::common_state_entropy(games, min_count);
        return {r.n_states(), r.mean_entropy};
    } catch (const Error& e) {
        if (e.code() != Errc::NoQualifyingStates)
            throw;
        return {0, std::nullopt};
    }
}

inline Bundle run_diversity(const DiversityConfig& c)
{
    c.validate();
    Bundle b;
    std::vector<chess::PgnGame> all;
    std::vector<CorpusStats> corpora;
    std::size_t parse_errors = 0;
    if (c.pgn.empty()) {
        for (std::size_t i = 0; i < c.rhos.size(); ++i) {
            auto games = synthetic_corpus(c, i);
            CorpusStats s{"cohort" + std::to_string(i + 1), c.rhos[i], synthetic_elo(c.rhos[i]), games.size(), 0, std::nullopt};
            std::tie(s.n_states, s.mean_entropy) = entropy_or_empty(games, c.min_count);
            corpora.push_back(s);
            if (c.write_pgn)
                b.add(s.label + ".pgn", chess::emit_pgn(games));
            all.insert(all.end(), games.begin(), games.end());
        }
    } else {
        for (const auto& path : c.pgn) {
            auto parsed = chess::parse_pgn(report::read_file(path));
            parse_errors += parsed.errors.size();
            all.insert(all.end(), parsed.games.begin(), parsed.games.end());
        }
    }
    std::vector<long long> cutoffs = c.cutoffs;
    if (cutoffs.empty())
        for (double rho : c.rhos)
            cutoffs.push_back(synthetic_elo(rho));
    std::sort(cutoffs.begin(), cutoffs.end());
    cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());

    report::CsvTable table({"cutoff", "n_states", "mean_entropy"});
    json rows = json::array();
    for (long long cut : cutoffs) {
        const auto kept = chess::filter_by_rating(all, cut).kept;
        const auto [n, h] = entropy_or_empty(kept, c.min_count);
        table.row({std::to_string(cut), std::to_string(n), h ? num(*h) : ""});
        json row{{"cutoff", cut}, {"games", kept.size()}, {"n_states", n}};
        row["mean_entropy"] = h ? json(*h) : json(nullptr);
        rows.push_back(std::move(row));
    }
    b.add("diversity.csv", table.str());

    json summary{{"meta", meta(c.seed, c.to_json())}, {"cutoffs", rows}, {"parse_errors", parse_errors}};
    if (!corpora.empty()) {
        report::CsvTable ct({"label", "rho", "elo", "games", "n_states", "mean_entropy"});
        json cj = json::array();
        bool decreasing = true;
        for (std::size_t i = 0; i < corpora.size(); ++i) {
            const auto& s = corpora[i];
            ct.row({s.label, num(s.rho), std::to_string(s.elo), std::to_string(s.games), std::to_string(s.n_states),
                    s.mean_entropy ? num(*s.mean_entropy) : ""});
            cj.push_back({{"label", s.label}, {"rho", s.rho}, {"elo", s.elo}, {"n_states", s.n_states},
                          {"mean_entropy", s.mean_entropy ? json(*s.mean_entropy) : json(nullptr)}});
            if (i > 0) {
                const bool noisier_before = corpora[i - 1].rho > s.rho;
                const auto& prev = corpora[i - 1].mean_entropy;
                decreasing = decreasing && noisier_before && prev && s.mean_entropy && *s.mean_entropy < *prev;
            }
        }
        summary["corpora"] = cj;
        summary["entropy_strictly_decreasing"] = decreasing;
        b.ok = decreasing;
        b.add("diversity_corpora.csv", ct.str());
    }
    b.add("diversity.json", report::json_text(summary));
    return b;
}

// ---------------------------------------------------------------------------
// PGN statistics

struct PgnStatsConfig {
    std::string pgn;
    std::optional<long long> cutoff;
    std::size_t min_count = 100;
    bool emit = false;

    json to_json() const
    {
        json j{{"pgn", pgn}, {"min_count", min_count}, {"emit", emit}};
        j["cutoff"] = cutoff ? json(*cutoff) : json(nullptr);
        return j;
    }
};

inline Bundle run_pgn_stats(const PgnStatsConfig& c)
{
    require(!c.pgn.empty(), "pgn path is required");
    require(c.min_count >= 2, "min_count must be at least 2");
    const auto parsed = chess::parse_pgn(report::read_file(c.pgn));
    std::vector<chess::PgnGame> games = parsed.games;
    json filter = nullptr;
    if (c.cutoff) {
        const auto f = chess::filter_by_rating(games, *c.cutoff);
        filter = {{"cutoff", *c.cutoff}, {"kept", f.kept.size()}, {"dropped_unrated", f.dropped_unrated}, {"dropped_above", f.dropped_above}};
        games = f.kept;
    }
    std::map<std::string, std::size_t> results;
    std::size_t plies = 0;
    std::size_t tokens = 0;
    for (const auto& g : games) {
        ++results[g.result];
        plies += g.moves.size();
        tokens += chess::tokenize32(g.movetext()).size();
    }
    json errors = json::array();
    for (const auto& e : parsed.errors)
        errors.push_back({{"game_index", e.game_index}, {"offset", e.offset}, {"code", std::string(to_string(e.code))}, {"message", e.message}});
    const auto [n_states, entropy] = entropy_or_empty(games, c.min_count);
    json summary{{"meta", meta(0, c.to_json())},
                 {"games_parsed", parsed.games.size()},
                 {"games", games.size()},
                 {"errors", errors},
                 {"results", results},
                 {"plies", plies},
                 {"mean_plies", games.empty() ? 0.0 : static_cast<double>(plies) / static_cast<double>(games.size())},
                 {"tokens", tokens},
                 {"vocabulary_version", chess::kVocabularyVersion},
                 {"filter", filter},
                 {"entropy", {{"min_count", c.min_count}, {"n_states", n_states}, {"mean_entropy", entropy ? json(*entropy) : json(nullptr)}}}};
    Bundle b;
    b.add("pgn_stats.json", report::json_text(summary));
    if (c.emit)
        b.add("games.pgn", chess::emit_pgn(games));
    return b;
}

// ---------------------------------------------------------------------------
// Rating from match records

struct RateConfig {
    std::string matches;  // CSV: candidate_id, anchor_id, score
    std::string anchors;  // CSV: anchor_id, rating, rd
    glicko2::PeriodMode period = glicko2::PeriodMode::Single;
    double system_tau = glicko2::kDefaultSystemTau;
    glicko2::Rating prior;

    json to_json() const
    {
        return {{"matches", matches},
                {"anchors", anchors},
                {"period_mode", std::string(glicko2::to_string(period))},
                {"system_tau", system_tau},
                {"prior_rating", prior.rating},
                {"prior_rd", prior.rd},
                {"prior_volatility", prior.volatility}};
    }
};

inline double parse_double(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::ConfigError, "bad number for " + what + ": '" + s + "'");
}

/// Rates every candidate in a match CSV against frozen anchors.
inline std::map<std::string, glicko2::AnchoredRating> rate_matches(std::string_view matches_csv, std::string_view anchors_csv,
                                                                   glicko2::PeriodMode mode, double system_tau,
                                                                   glicko2::Rating prior = {})
{
    std::map<std::string, glicko2::Rating> anchors;
    for (const auto& row : report::parse_csv(anchors_csv)) {
        if (row.size() >= 1 && row[0] == "anchor_id")
            continue;
        require(row.size() == 3, "anchor rows need anchor_id,rating,rd");
        glicko2::Rating r{parse_double(row[1], "rating"), parse_double(row[2], "rd"), 0.06};
        r.validate();
        anchors[row[0]] = r;
    }
    // Per candidate, anchor results in order of first appearance.
    std::map<std::string, std::vector<std::pair<std::string, glicko2::AnchorResult>>> per;
    for (const auto& row : report::parse_csv(matches_csv)) {
        if (row.size() >= 1 && row[0] == "candidate_id")
            continue;
        require(row.size() == 3, "match rows need candidate_id,anchor_id,score");
        const auto a = anchors.find(row[1]);
        require(a != anchors.end(), "unknown anchor: " + row[1]);
        const double s = parse_double(row[2], "score");
        require(s == 0.0 || s == 0.5 || s == 1.0, "score must be 0, 0.5 or 1");
        auto& list = per[row[0]];
        auto it = std::find_if(list.begin(), list.end(), [&](const auto& p) { return p.first == row[1]; });
        if (it == list.end()) {
            list.push_back({row[1], glicko2::AnchorResult{a->second}});
            it = std::prev(list.end());
        }
        (s == 1.0 ? it->second.wins : s == 0.0 ? it->second.losses : it->second.draws) += 1;
    }
    std::map<std::string, glicko2::AnchoredRating> out;
    for (const auto& [cand, list] : per) {
        std::vector<glicko2::AnchorResult> results;
        for (const auto& [id, r] : list)
            results.push_back(r);
        out[cand] = glicko2::rate_anchored(results, mode, system_tau, prior);
    }
    return out;
}

inline Bundle run_rate(const RateConfig& c)
{
    const auto ratings = rate_matches(report::read_file(c.matches), report::read_file(c.anchors), c.period, c.system_tau, c.prior);
    require(!ratings.empty(), "no match records");
    report::CsvTable table({"candidate_id", "rating", "rd", "volatility", "ci_low", "ci_high", "n_games"});
    json j = json::object();
    for (const auto& [id, r] : ratings) {
        table.row({id, num(r.rating.rating), num(r.rating.rd), num(r.rating.volatility), num(r.ci.low), num(r.ci.high), std::to_string(r.n_games)});
        j[id] = to_json(r);
    }
    Bundle b;
    b.add("ratings.csv", table.str());
    b.add("ratings.json", report::json_text({{"meta", meta(0, c.to_json())}, {"ratings", j}}));
    return b;
}

// ---------------------------------------------------------------------------
// Engine tournaments

struct PlayConfig {
    std::uint64_t seed = 1;
    std::string engine_cmd = "mock";
    std::string provider_cmd = "random";  // "random", "garbage", "tabular" or a command line
    std::string pgn;                      // corpus for the tabular provider
    double provider_tau = 0.001;
    std::vector<int> skills{1, 3, 5};
    std::map<std::string, std::vector<double>> anchors{{"1", {1552, 45.2}}, {"3", {1842, 45.2}}, {"5", {2142, 59}}};
    int movetime_ms = engine::kDefaultMovetimeMs;
    std::size_t games = 100;  // per skill level
    int retry_limit = 5;
    int max_plies = 400;
    glicko2::PeriodMode period = glicko2::PeriodMode::Single;
    double system_tau = glicko2::kDefaultSystemTau;

    static PlayConfig from_json(const json& j)
    {
        PlayConfig c;
        ConfigReader r(j);
        r.get("seed", c.seed)
            .get("engine_cmd", c.engine_cmd)
            .get("provider_cmd", c.provider_cmd)
            .get("pgn", c.pgn)
            .get("provider_tau", c.provider_tau)
            .get("skills", c.skills)
            .get("anchors", c.anchors)
            .get("movetime_ms", c.movetime_ms)
            .get("games", c.games)
            .get("retry_limit", c.retry_limit)
            .get("max_plies", c.max_plies)
            .period("period_mode", c.period)
            .get("system_tau", c.system_tau);
        r.finish();
        c.validate();
        return c;
    }

    void validate() const
    {
        require(!skills.empty(), "need at least one skill level");
        for (int s : skills) {
            const auto it = anchors.find(std::to_string(s));
            require(it != anchors.end() && it->second.size() == 2, "no anchor rating (rating, rd) for skill " + std::to_string(s));
        }
        require(games >= 1, "games must be at least 1");
        require(retry_limit >= 1, "retry_limit must be at least 1");
        require(movetime_ms >= 1, "movetime_ms must be positive");
        require(provider_tau > 0.0, "provider_tau must be positive");
        if (provider_cmd == "tabular")
            require(!pgn.empty(), "the tabular provider needs a pgn corpus");
    }

    json to_json() const
    {
        return {{"seed", seed},
                {"engine_cmd", engine_cmd},
                {"provider_cmd", provider_cmd},
                {"pgn", pgn},
                {"provider_tau", provider_tau},
                {"skills", skills},
                {"anchors", anchors},
                {"movetime_ms", movetime_ms},
                {"games", games},
                {"retry_limit", retry_limit},
                {"max_plies", max_plies},
                {"period_mode", std::string(glicko2::to_string(period))},
                {"system_tau", system_tau}};
    }
};

inline std::unique_ptr<engine::LineChannel> open_provider(const PlayConfig& c, std::uint64_t seed)
{
    if (c.provider_cmd == "random")
        return engine::random_legal_provider(seed);
    if (c.provider_cmd == "garbage")
        return engine::garbage_provider();
    if (c.provider_cmd == "tabular") {
        const auto parsed = chess::parse_pgn(report::read_file(c.pgn));
        return engine::tabular_provider(engine::TabularChessPolicy::from_games(parsed.games), Temperature(c.provider_tau), seed);
    }
    return std::make_unique<engine::ProcessChannel>(engine::split_command(c.provider_cmd));
}

inline Bundle run_play(const PlayConfig& c)
{
    c.validate();
    report::CsvTable table({"skill", "game", "provider_color", "score", "forfeit", "failed_samples", "plies", "termination"});
    std::vector<glicko2::AnchorResult> results;
    std::vector<chess::PgnGame> pgn;
    json per_skill = json::array();
    std::size_t forfeits = 0;
    std::size_t total = 0;
    auto provider = open_provider(c, derive_seed(c.seed, 0));
    for (int skill : c.skills) {
        const auto& a = c.anchors.at(std::to_string(skill));
        const glicko2::Rating anchor{a[0], a[1], 0.06};
        engine::EngineOptions eo;
        eo.skill = skill;
        eo.movetime_ms = c.movetime_ms;
        auto eng = open_engine(c.engine_cmd, eo, static_cast<std::uint64_t>(skill));
        engine::MatchOptions mo;
        mo.games = c.games;
        mo.retry_limit = c.retry_limit;
        mo.max_plies = c.max_plies;
        const auto report = engine::play_rated_match(*provider, *eng, mo);
        for (const auto& g : report.games) {
            table.row({std::to_string(skill), std::to_string(g.index), g.provider_color == chess::Color::White ? "white" : "black",
                       num(g.score), g.forfeit ? "1" : "0", std::to_string(g.failed_samples), std::to_string(g.game.moves.size()),
                       g.termination});
            chess::PgnGame game = g.game;
            game.tags.emplace_back("Skill", std::to_string(skill));
            pgn.push_back(std::move(game));
        }
        const auto tally = report.tally(anchor);
        results.push_back(tally);
        forfeits += report.forfeits();
        total += report.games.size();
        per_skill.push_back({{"skill", skill}, {"anchor_rating", anchor.rating}, {"anchor_rd", anchor.rd}, {"wins", tally.wins},
                             {"draws", tally.draws}, {"losses", tally.losses}, {"forfeits", report.forfeits()}});
    }
    const auto rating = glicko2::rate_anchored(results, c.period, c.system_tau);
    Bundle b;
    b.add("play_games.csv", table.str());
    b.add("play.pgn", chess::emit_pgn(pgn));
    b.add("play.json", report::json_text({{"meta", meta(c.seed, c.to_json())},
                                          {"rating", to_json(rating)},
                                          {"per_skill", per_skill},
                                          {"forfeit_rate", static_cast<double>(forfeits) / static_cast<double>(total)}}));
    return b;
}

} // namespace transcend::experiments
