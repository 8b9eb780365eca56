#pragma once

// Rating-cutoff filtering, common-state action entropy and synthetic noisy
// corpora.

#include <transcend/chess/pgn.hpp>
#include <transcend/dist.hpp>
#include <transcend/random.hpp>

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace transcend::chess {

struct RatingFilter {
    std::vector<PgnGame> kept;
    std::size_t dropped_unrated = 0;
    std::size_t dropped_above = 0;
};

/// Keeps games with max(WhiteElo, BlackElo) <= cutoff.
inline RatingFilter filter_by_rating(std::span<const PgnGame> games, long long cutoff)
{
    if (cutoff <= 0)
        throw Error(Errc::ConfigError, "rating cutoff must be positive");
    RatingFilter out;
    for (const PgnGame& g : games) {
        if (!g.white_elo || !g.black_elo) {
            ++out.dropped_unrated;
            continue;
        }
        if (std::max(*g.white_elo, *g.black_elo) <= cutoff)
            out.kept.push_back(g);
        else
            ++out.dropped_above;
    }
    return out;
}

inline constexpr long long kNoCutoff = std::numeric_limits<long long>::max();

struct StateEntropy {
    std::string key;  // FEN without clocks
    std::size_t legal_count = 0;
    std::size_t action_count = 0;
    double entropy = 0.0;
};

struct EntropyReport {
    std::vector<StateEntropy> states;  // sorted by key
    double mean_entropy = 0.0;

    std::size_t n_states() const noexcept { return states.size(); }
};

/// Observed move counts per position across a corpus.
class StateActionCounts {
public:
    void add_game(const PgnGame& g)
    {
        Position pos = g.start();
        for (const std::string& san : g.moves) {
            const Move m = parse_san(pos, san);
            auto& entry = counts_[pos.key()];
            if (entry.legal == 0)
                entry.legal = pos.legal_moves().size();
            ++entry.moves[m.uci()];
            pos = pos.apply(m);
        }
    }

    void merge(const StateActionCounts& other)
    {
        for (const auto& [key, e] : other.counts_) {
            auto& mine = counts_[key];
            mine.legal = e.legal;
            for (const auto& [mv, n] : e.moves)
                mine.moves[mv] += n;
        }
    }

    EntropyReport entropy(std::size_t min_count) const
    {
        if (min_count < 2)
            throw Error(Errc::ConfigError, "min_count must be at least 2");
        EntropyReport r;
        double sum = 0.0;
        for (const auto& [key, e] : counts_) {
            if (e.legal < 2)
                continue;
            std::size_t total = 0;
            std::vector<std::uint64_t> c;
            for (const auto& [mv, n] : e.moves) {
                total += n;
                c.push_back(n);
            }
            if (total < min_count)
                continue;
            const double h = normalized_entropy(c, e.legal);
            r.states.push_back({key, e.legal, total, h});
            sum += h;
        }
        if (r.states.empty())
            throw Error(Errc::NoQualifyingStates, "no state has " + std::to_string(min_count) + " observed actions");
        r.mean_entropy = sum / static_cast<double>(r.states.size());
        return r;
    }

private:
    struct Entry {
        std::size_t legal = 0;
        std::map<std::string, std::uint64_t> moves;
    };
    std::map<std::string, Entry> counts_;
};

inline EntropyReport common_state_entropy(std::span<const PgnGame> games, std::size_t min_count = 100)
{
    StateActionCounts counts;
    for (const PgnGame& g : games)
        counts.add_game(g);
    return counts.entropy(min_count);
}

inline nlohmann::json summary_json(const EntropyReport& r)
{
    return {{"n_states", r.n_states()}, {"mean_entropy", r.mean_entropy}};
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t salt = 0)
{
    std::uint64_t h = 0xcbf29ce484222325ULL ^ salt;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// A noisy player: with probability 1 - rho it plays a fixed preferred move
/// per position (chosen by hashing the position), otherwise a uniform legal move.
struct NoisyChessPlayer {
    double rho = 0.5;
    std::uint64_t style = 0;  // hash salt picking the preferred moves

    Move choose(const Position& pos, const std::vector<Move>& legal, Rng& rng) const
    {
        if (rng.uniform() < rho)
            return legal[rng.below(legal.size())];
        return legal[fnv1a(pos.key(), style) % legal.size()];
    }
};

struct CorpusOptions {
    std::size_t games = 1000;
    int max_plies = 16;
    int white_elo = 1500;
    int black_elo = 1500;
};

inline std::string result_of(const Position& final_pos)
{
    if (final_pos.is_checkmate())
        return final_pos.side_to_move() == Color::White ? "0-1" : "1-0";
    if (final_pos.is_stalemate() || final_pos.insufficient_material())
        return "1/2-1/2";
    return "*";
}

/// Games between players drawn uniformly from a cohort, one pair per game.
inline std::vector<PgnGame> generate_cohort_corpus(std::span<const NoisyChessPlayer> cohort, const CorpusOptions& opt,
                                                   Rng& rng)
{
    if (cohort.empty())
        throw Error(Errc::ConfigError, "empty cohort");
    std::vector<PgnGame> out;
    out.reserve(opt.games);
    for (std::size_t i = 0; i < opt.games; ++i) {
        const NoisyChessPlayer& white = cohort[rng.below(cohort.size())];
        const NoisyChessPlayer& black = cohort[rng.below(cohort.size())];
        PgnGame g;
        g.tags = {{"Event", "synthetic"},
                  {"Round", std::to_string(i + 1)},
                  {"WhiteElo", std::to_string(opt.white_elo)},
                  {"BlackElo", std::to_string(opt.black_elo)}};
        g.white_elo = opt.white_elo;
        g.black_elo = opt.black_elo;
        Position pos = Position::startpos();
        for (int ply = 0; ply < opt.max_plies; ++ply) {
            const auto legal = pos.legal_moves();
            if (legal.empty())
                break;
            const Move m = (pos.side_to_move() == Color::White ? white : black).choose(pos, legal, rng);
            g.moves.push_back(to_san(pos, m));
            pos = pos.apply(m);
        }
        g.result = result_of(pos);
        g.tags.emplace_back("Result", g.result);
        out.push_back(std::move(g));
    }
    return out;
}

/// Self-play corpus of one noisy player.
inline std::vector<PgnGame> generate_noisy_corpus(const NoisyChessPlayer& player, const CorpusOptions& opt, Rng& rng)
{
    return generate_cohort_corpus(std::span<const NoisyChessPlayer>(&player, 1), opt, rng);
}

} // namespace transcend::chess
