// transcend: experiment runner.
//
//   transcend <subcommand> [--config FILE] [--out DIR] [overrides...]
//
// Exit codes: 0 success, 1 a checked property failed, 2 config error,
// 3 external process failure.

#include <transcend/experiments.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace transcend;
using namespace transcend::experiments;

namespace {

enum Exit { kOk = 0, kViolation = 1, kConfig = 2, kExternal = 3 };

int exit_code_for(Errc c)
{
    switch (c) {
    case Errc::EngineTimeout:
    case Errc::IllegalEngineMove:
    case Errc::EngineCrashed:
    case Errc::ProviderUnreachable:
    case Errc::ProviderTimeout:
        return kExternal;
    default:
        return kConfig;
    }
}

/// The config object for a subcommand: the file's section named after it if
/// present, otherwise the whole file.
json load_config(const std::string& path, const std::string& section)
{
    if (path.empty())
        return json::object();
    json j;
    try {
        j = json::parse(report::read_file(path));
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigError, path + ": " + e.what());
    }
    if (!j.is_object())
        throw Error(Errc::ConfigError, path + ": top level must be an object");
    if (auto it = j.find(section); it != j.end() && it->is_object())
        return *it;
    return j;
}

struct Common {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
};

struct EngineFlags {
    std::optional<std::string> engine_cmd;
    std::optional<std::vector<int>> skills;
    std::optional<int> movetime_ms;
    std::optional<std::size_t> games;
    std::optional<int> retry_limit;
};

template <class T>
void set_if(json& j, const char* key, const std::optional<T>& v)
{
    if (v)
        j[key] = *v;
}

void add_common(CLI::App* app, Common& c, bool workers)
{
    app->add_option("--config", c.config, "JSON config file");
    app->add_option("--out", c.out, "output directory")->capture_default_str();
    app->add_option("--seed", c.seed, "root seed");
    if (workers)
        app->add_option("--workers", c.workers, "worker threads");
}

json overrides(const Common& c, const std::string& section)
{
    json j = load_config(c.config, section);
    set_if(j, "seed", c.seed);
    set_if(j, "workers", c.workers);
    return j;
}

std::string defaults_reference()
{
    std::string out = "# transcend config reference\n\n"
                      "Each subcommand reads a JSON object. A config file may hold one object per\n"
                      "subcommand under its name, or a single flat object. Unknown keys are errors.\n";
    auto section = [&](const char* name, const json& j) {
        out += std::string("\n## ") + name + "\n\n```json\n" + j.dump(2) + "\n```\n";
    };
    section("theorems", TheoremsConfig{}.to_json());
    section("demo", DemoConfig{}.to_json());
    FavorConfig favor;
    section("favor", favor.to_json());
    favor.mode = "chess";
    json chess = favor.to_json();
    chess["pgn"] = "games.pgn";
    out += "\nChess mode adds:\n\n```json\n" + chess.dump(2) + "\n```\n";
    section("diversity", DiversityConfig{}.to_json());
    section("pgn-stats", PgnStatsConfig{}.to_json());
    section("rate", RateConfig{}.to_json());
    section("play", PlayConfig{}.to_json());
    return out;
}

PgnStatsConfig pgn_stats_config(const json& j)
{
    PgnStatsConfig c;
    json cutoff;
    ConfigReader r(j);
    r.get("pgn", c.pgn).get("min_count", c.min_count).get("emit", c.emit).get("cutoff", cutoff);
    r.finish();
    if (cutoff.is_number_integer())
        c.cutoff = cutoff.get<long long>();
    else if (!cutoff.is_null())
        throw Error(Errc::ConfigError, "cutoff must be an integer");
    return c;
}

RateConfig rate_config(const json& j)
{
    RateConfig c;
    ConfigReader r(j);
    r.get("matches", c.matches).get("anchors", c.anchors).period("period_mode", c.period).get("system_tau", c.system_tau);
    r.get("prior_rating", c.prior.rating).get("prior_rd", c.prior.rd).get("prior_volatility", c.prior.volatility);
    r.finish();
    c.prior.validate();
    if (c.matches.empty() || c.anchors.empty())
        throw Error(Errc::ConfigError, "rate needs both a matches and an anchors CSV");
    return c;
}

int finish(const Bundle& b, const std::string& out, const std::string& what)
{
    b.write(out);
    for (const auto& [name, content] : b.files)
        std::cout << "wrote " << (std::filesystem::path(out) / name).string() << "\n";
    if (!b.ok) {
        std::cerr << what << ": checked property did not hold\n";
        return kViolation;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Temperature-sampling transcendence experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Common common;
    EngineFlags eng;
    std::vector<std::string> pgn_paths;
    std::vector<long long> cutoffs;
    std::string mode;
    std::string provider_cmd;
    std::optional<long long> cutoff;
    std::string matches;
    std::string anchors;

    auto* theorems = app.add_subcommand("theorems", "verify the four theorems on seeded random instances");
    add_common(theorems, common, true);

    auto* demo = app.add_subcommand("demo", "tic-tac-toe rating sweep over temperatures");
    add_common(demo, common, true);
    demo->add_option("--games", eng.games, "rated games per player");

    auto* favor = app.add_subcommand("favor", "favor of low over high temperature per visited state");
    add_common(favor, common, false);
    favor->add_option("--mode", mode, "tictactoe or chess");
    favor->add_option("--pgn", pgn_paths, "corpus for the chess policy")->expected(0, 1);
    favor->add_option("--engine-cmd", eng.engine_cmd, "UCI engine command, or 'mock'");
    favor->add_option("--movetime-ms", eng.movetime_ms, "engine move time");
    favor->add_option("--games", eng.games, "visitation games");

    auto* diversity = app.add_subcommand("diversity", "mean action entropy over rating cutoffs");
    add_common(diversity, common, false);
    diversity->add_option("--pgn", pgn_paths, "PGN corpora (default: synthetic cohorts)");
    diversity->add_option("--cutoffs", cutoffs, "rating cutoffs");

    auto* pgn_stats = app.add_subcommand("pgn-stats", "parse a PGN file and summarize it");
    pgn_stats->add_option("--config", common.config, "JSON config file");
    pgn_stats->add_option("--out", common.out, "output directory")->capture_default_str();
    pgn_stats->add_option("pgn", pgn_paths, "PGN file")->expected(0, 1);
    pgn_stats->add_option("--cutoff", cutoff, "keep games whose higher rating is at most this");

    auto* rate = app.add_subcommand("rate", "Glicko-2 ratings from match records against fixed anchors");
    rate->add_option("--config", common.config, "JSON config file");
    rate->add_option("--out", common.out, "output directory")->capture_default_str();
    rate->add_option("--matches", matches, "CSV candidate_id,anchor_id,score");
    rate->add_option("--anchors", anchors, "CSV anchor_id,rating,rd");

    auto* play = app.add_subcommand("play", "rated games between a move provider and a UCI engine");
    add_common(play, common, false);
    play->add_option("--engine-cmd", eng.engine_cmd, "UCI engine command, or 'mock'");
    play->add_option("--provider-cmd", provider_cmd, "provider command, or random|garbage|tabular");
    play->add_option("--pgn", pgn_paths, "corpus for the tabular provider")->expected(0, 1);
    play->add_option("--skill", eng.skills, "engine skill levels");
    play->add_option("--movetime-ms", eng.movetime_ms, "engine move time");
    play->add_option("--games", eng.games, "games per skill level");
    play->add_option("--retry-limit", eng.retry_limit, "failed samples before a forfeit");

    auto* defaults = app.add_subcommand("defaults", "print the config reference with every default");

    CLI11_PARSE(app, argc, argv);

    try {
        if (defaults->parsed()) {
            std::cout << defaults_reference();
            return kOk;
        }
        if (theorems->parsed()) {
            const auto c = TheoremsConfig::from_json(overrides(common, "theorems"));
            return finish(run_theorems(c), common.out, "theorems");
        }
        if (demo->parsed()) {
            json j = overrides(common, "demo");
            set_if(j, "games", eng.games);
            return finish(run_demo(DemoConfig::from_json(j)), common.out, "demo");
        }
        if (favor->parsed()) {
            json j = overrides(common, "favor");
            if (!mode.empty())
                j["mode"] = mode;
            if (!pgn_paths.empty())
                j["pgn"] = pgn_paths.front();
            set_if(j, "engine_cmd", eng.engine_cmd);
            set_if(j, "movetime_ms", eng.movetime_ms);
            set_if(j, "games", eng.games);
            return finish(run_favor(FavorConfig::from_json(j)), common.out, "favor");
        }
        if (diversity->parsed()) {
            json j = overrides(common, "diversity");
            if (!pgn_paths.empty())
                j["pgn"] = pgn_paths;
            if (!cutoffs.empty())
                j["cutoffs"] = cutoffs;
            return finish(run_diversity(DiversityConfig::from_json(j)), common.out, "diversity");
        }
        if (pgn_stats->parsed()) {
            json j = load_config(common.config, "pgn-stats");
            if (!pgn_paths.empty())
                j["pgn"] = pgn_paths.front();
            set_if(j, "cutoff", cutoff);
            return finish(run_pgn_stats(pgn_stats_config(j)), common.out, "pgn-stats");
        }
        if (rate->parsed()) {
            json j = load_config(common.config, "rate");
            if (!matches.empty())
                j["matches"] = matches;
            if (!anchors.empty())
                j["anchors"] = anchors;
            return finish(run_rate(rate_config(j)), common.out, "rate");
        }
        if (play->parsed()) {
            json j = overrides(common, "play");
            set_if(j, "engine_cmd", eng.engine_cmd);
            if (!provider_cmd.empty())
                j["provider_cmd"] = provider_cmd;
            if (!pgn_paths.empty())
                j["pgn"] = pgn_paths.front();
            set_if(j, "skills", eng.skills);
            set_if(j, "movetime_ms", eng.movetime_ms);
            set_if(j, "games", eng.games);
            set_if(j, "retry_limit", eng.retry_limit);
            return finish(run_play(PlayConfig::from_json(j)), common.out, "play");
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    return kOk;
}
