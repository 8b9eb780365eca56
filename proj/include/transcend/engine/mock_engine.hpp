#pragma once

// A deterministic stand-in for a UCI engine. It answers with a one-ply
// material search, can be scripted per position, and can misbehave on demand.

#include <transcend/chess/dataset.hpp>
#include <transcend/engine/channel.hpp>
#include <transcend/engine/uci.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace transcend::engine {

enum class MockFault { None, IllegalMove, Silent, Crash };

struct MockEngineOptions {
    MockFault fault = MockFault::None;
    std::map<std::string, std::string> script;  // position key -> uci move
    std::uint64_t salt = 0;                     // tie-break hash salt
};

inline int material_balance(const chess::Position& pos, chess::Color side)
{
    static constexpr int kValue[] = {0, 100, 300, 300, 500, 900, 0};
    int score = 0;
    for (chess::Square s = 0; s < 64; ++s) {
        const chess::Piece p = pos.at(s);
        if (p.empty())
            continue;
        const int v = kValue[static_cast<int>(p.type)];
        score += p.color == side ? v : -v;
    }
    return score;
}

/// Material plus a small bonus for pawns and minor pieces near the centre.
inline int static_eval(const chess::Position& pos, chess::Color side)
{
    int score = material_balance(pos, side);
    for (chess::Square s = 0; s < 64; ++s) {
        const chess::Piece p = pos.at(s);
        if (p.empty() || p.type == chess::PieceType::Rook || p.type == chess::PieceType::Queen || p.type == chess::PieceType::King)
            continue;
        const int df = std::abs(2 * chess::file_of(s) - 7);
        const int dr = std::abs(2 * chess::rank_of(s) - 7);
        const int bonus = 4 * (7 - std::max(df, dr));
        score += p.color == side ? bonus : -bonus;
    }
    return score;
}

class MockEngine {
public:
    explicit MockEngine(MockEngineOptions opt = {}) : opt_(std::move(opt)) {}

    /// Replies to one input line. After a crash fault the engine reports itself gone.
    std::vector<std::string> handle(std::string_view line)
    {
        const auto w = detail::words(line);
        if (w.empty())
            return {};
        const std::string_view cmd = w[0];
        if (cmd == "uci") {
            saw_uci_ = true;
            return {"id name transcend-mock", "id author transcend", "option name Skill Level type spin default 20 min 0 max 20", "uciok"};
        }
        if (cmd == "setoption") {
            if (w.size() >= 6 && w[2] == "Skill")
                skill_ = detail::to_int(w[5]).value_or(skill_);
            return {};
        }
        if (cmd == "isready") {
            ready_ = saw_uci_;
            return {"readyok"};
        }
        if (cmd == "ucinewgame") {
            ready_ = false;
            return {};
        }
        if (cmd == "position")
            return set_position(w);
        if (cmd == "go") {
            if (!ready_ || !pos_) {
                ++violations_;
                return {"info string protocol violation: go before readyok"};
            }
            ++searches_;
            return go();
        }
        if (cmd == "quit" || cmd == "stop")
            return {};
        return {"info string unknown command " + std::string(cmd)};
    }

    bool crashed() const noexcept { return crashed_; }
    int violations() const noexcept { return violations_; }
    int searches() const noexcept { return searches_; }
    int skill() const noexcept { return skill_; }

    /// The move the mock plays and the score it reports, for a position.
    std::pair<chess::Move, EvalResult> analyse(const chess::Position& pos) const
    {
        const auto legal = pos.legal_moves();
        const chess::Color me = pos.side_to_move();
        std::optional<chess::Move> best;
        int best_score = 0;
        std::uint64_t best_tie = 0;
        for (const chess::Move& m : legal) {
            const chess::Position next = pos.apply(m);
            int score;
            if (next.is_checkmate())
                score = 100000;
            else if (next.is_stalemate())
                score = 0;
            else
                score = static_eval(next, me) - (next.in_check() ? 0 : blunder_penalty(next));
            // Weaker settings add position-dependent noise to the move choice.
            const std::uint64_t h = chess::fnv1a(next.key(), opt_.salt);
            score += static_cast<int>(h % static_cast<std::uint64_t>(21 - std::clamp(skill_, 0, 20))) * 10;
            if (!best || score > best_score || (score == best_score && h < best_tie)) {
                best = m;
                best_score = score;
                best_tie = h;
            }
        }
        EvalResult e;
        if (best && pos.apply(*best).is_checkmate()) {
            e.mate = 1;
            e.win_prob = win_prob_from_mate(1);
        } else {
            // Static score plus half of the best capture on offer.
            const int cp = static_eval(pos, me) + capture_gain(pos) / 2;
            e.centipawns = cp;
            e.win_prob = win_prob_from_cp(cp);
        }
        return {best.value_or(chess::Move{}), e};
    }

private:
    /// Value of the largest piece the side to move can capture.
    static int capture_gain(const chess::Position& pos)
    {
        static constexpr int kValue[] = {0, 100, 300, 300, 500, 900, 0};
        int best = 0;
        for (const chess::Move& r : pos.legal_moves())
            if (r.is_capture())
                best = std::max(best, r.is_en_passant() ? 100 : kValue[static_cast<int>(pos.at(r.to).type)]);
        return best;
    }

    static int blunder_penalty(const chess::Position& next) { return capture_gain(next); }

    std::vector<std::string> set_position(const std::vector<std::string_view>& w)
    {
        std::size_t i = 1;
        try {
            chess::Position p;
            if (i < w.size() && w[i] == "startpos") {
                p = chess::Position::startpos();
                ++i;
            } else if (i < w.size() && w[i] == "fen" && i + 6 < w.size()) {
                std::string fen;
                for (std::size_t k = i + 1; k <= i + 6; ++k)
                    fen += std::string(w[k]) + (k < i + 6 ? " " : "");
                p = chess::Position::from_fen(fen);
                i += 7;
            } else {
                pos_.reset();
                return {"info string bad position command"};
            }
            if (i < w.size() && w[i] == "moves")
                for (++i; i < w.size(); ++i) {
                    const auto m = p.find_uci(w[i]);
                    if (!m)
                        throw Error(Errc::IllegalMove, std::string(w[i]));
                    p = p.apply(*m);
                }
            pos_ = p;
        } catch (const Error& e) {
            pos_.reset();
            return {std::string("info string bad position: ") + e.what()};
        }
        return {};
    }

    std::vector<std::string> go()
    {
        switch (opt_.fault) {
        case MockFault::Silent:
            return {};
        case MockFault::Crash:
            crashed_ = true;
            return {};
        case MockFault::IllegalMove:
            return {"info depth 1 score cp 0", "bestmove a1a1"};
        case MockFault::None:
            break;
        }
        if (auto it = opt_.script.find(pos_->key()); it != opt_.script.end())
            return {"info depth 1 score cp 0", "bestmove " + it->second};
        if (pos_->legal_moves().empty())
            return {pos_->in_check() ? "info depth 0 score mate 0" : "info depth 0 score cp 0", "bestmove (none)"};
        const auto [m, e] = analyse(*pos_);
        std::string info = "info depth 1 score ";
        info += e.mate ? "mate " + std::to_string(*e.mate) : "cp " + std::to_string(*e.centipawns);
        return {info, "bestmove " + m.uci()};
    }

    MockEngineOptions opt_;
    std::optional<chess::Position> pos_;
    int skill_ = 20;
    bool saw_uci_ = false;
    bool ready_ = false;
    bool crashed_ = false;
    int violations_ = 0;
    int searches_ = 0;
};

/// An in-process channel speaking to a MockEngine.
inline std::unique_ptr<FunctionChannel> mock_channel(std::shared_ptr<MockEngine> engine)
{
    return std::make_unique<FunctionChannel>([engine](std::string_view line) { return engine->handle(line); },
                                             [engine] { return engine->crashed(); });
}

} // namespace transcend::engine
