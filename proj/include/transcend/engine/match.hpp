#pragma once

// Rated games between a policy provider and a UCI engine.

#include <transcend/engine/provider.hpp>
#include <transcend/engine/uci.hpp>
#include <transcend/glicko2.hpp>

#include <map>
#include <string>
#include <vector>

namespace transcend::engine {

struct MatchOptions {
    std::size_t games = 100;
    int retry_limit = 5;
    int max_plies = 400;  // longer games are adjudicated a draw
    std::chrono::milliseconds provider_timeout = kProviderTimeout;
};

struct GameRecord {
    std::size_t index = 0;
    chess::Color provider_color = chess::Color::White;
    double score = 0.5;  // provider's score
    bool forfeit = false;
    std::size_t failed_samples = 0;
    std::string termination;
    chess::PgnGame game;
};

struct MatchReport {
    std::vector<GameRecord> games;

    std::size_t forfeits() const
    {
        std::size_t n = 0;
        for (const auto& g : games)
            n += g.forfeit ? 1 : 0;
        return n;
    }

    double forfeit_rate() const { return games.empty() ? 0.0 : static_cast<double>(forfeits()) / static_cast<double>(games.size()); }

    glicko2::AnchorResult tally(const glicko2::Rating& anchor) const
    {
        glicko2::AnchorResult r{anchor};
        for (const auto& g : games)
            (g.score == 1.0 ? r.wins : g.score == 0.0 ? r.losses : r.draws) += 1;
        return r;
    }

    std::vector<glicko2::MatchRecord> records(const glicko2::Rating& anchor) const
    {
        std::vector<glicko2::MatchRecord> out;
        for (const auto& g : games)
            out.push_back({anchor, g.score});
        return out;
    }
};

namespace detail {

inline bool counts_as_failed_sample(Errc c)
{
    return c == Errc::MalformedReply || c == Errc::ProviderTimeout || c == Errc::IllegalSan || c == Errc::AmbiguousSan
        || c == Errc::MalformedSan;
}

/// Result for `provider` if the game is over at `pos`, else empty.
inline std::optional<std::pair<double, std::string>> finished(const chess::Position& pos, chess::Color provider,
                                                              const std::map<std::string, int>& seen)
{
    if (pos.is_checkmate())
        return std::pair{pos.side_to_move() == provider ? 0.0 : 1.0, std::string("checkmate")};
    if (pos.is_stalemate())
        return std::pair{0.5, std::string("stalemate")};
    if (pos.insufficient_material())
        return std::pair{0.5, std::string("insufficient material")};
    if (pos.halfmove_clock() >= 100)
        return std::pair{0.5, std::string("fifty-move rule")};
    if (auto it = seen.find(pos.key()); it != seen.end() && it->second >= 3)
        return std::pair{0.5, std::string("threefold repetition")};
    return std::nullopt;
}

inline std::string result_string(double provider_score, chess::Color provider)
{
    if (provider_score == 0.5)
        return "1/2-1/2";
    const bool white_won = (provider_score == 1.0) == (provider == chess::Color::White);
    return white_won ? "1-0" : "0-1";
}

} // namespace detail

/// Plays `opt.games` games, the provider taking white in even-numbered games.
/// A provider that fails `retry_limit` samples in a row on one move forfeits.
inline MatchReport play_rated_match(LineChannel& provider, UciEngine& engine, const MatchOptions& opt)
{
    if (opt.retry_limit < 1)
        throw Error(Errc::ConfigError, "retry limit must be at least 1");
    MatchReport report;
    for (std::size_t i = 0; i < opt.games; ++i) {
        GameRecord rec;
        rec.index = i;
        rec.provider_color = i % 2 == 0 ? chess::Color::White : chess::Color::Black;
        engine.new_game();
        chess::Position pos = chess::Position::startpos();
        std::map<std::string, int> seen{{pos.key(), 1}};
        std::vector<std::string> sans;
        while (true) {
            if (auto done = detail::finished(pos, rec.provider_color, seen)) {
                rec.score = done->first;
                rec.termination = done->second;
                break;
            }
            if (static_cast<int>(sans.size()) >= opt.max_plies) {
                rec.score = 0.5;
                rec.termination = "ply limit";
                break;
            }
            std::optional<chess::Move> move;
            if (pos.side_to_move() == rec.provider_color) {
                const std::string prompt = prompt_movetext(sans);
                for (int attempt = 0; attempt < opt.retry_limit && !move; ++attempt) {
                    try {
                        move = chess::parse_san(pos, provider_request(provider, prompt, opt.provider_timeout));
                    } catch (const Error& e) {
                        if (!detail::counts_as_failed_sample(e.code()))
                            throw;
                        ++rec.failed_samples;
                    }
                }
                if (!move) {
                    rec.forfeit = true;
                    rec.score = 0.0;
                    rec.termination = "forfeit";
                    break;
                }
            } else {
                move = engine.best_move(pos);
            }
            sans.push_back(chess::to_san(pos, *move));
            pos = pos.apply(*move);
            ++seen[pos.key()];
        }
        rec.game.moves = sans;
        rec.game.result = detail::result_string(rec.score, rec.provider_color);
        const bool provider_white = rec.provider_color == chess::Color::White;
        rec.game.tags = {{"Event", "rated match"},
                         {"Round", std::to_string(i + 1)},
                         {"White", provider_white ? "provider" : "engine"},
                         {"Black", provider_white ? "engine" : "provider"},
                         {"Result", rec.game.result},
                         {"Termination", rec.termination}};
        report.games.push_back(std::move(rec));
    }
    return report;
}

} // namespace transcend::engine
