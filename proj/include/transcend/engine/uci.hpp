#pragma once

// UCI client: handshake, bestmove search and score parsing.

#include <transcend/chess/position.hpp>
#include <transcend/engine/channel.hpp>

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace transcend::engine {

inline constexpr int kDefaultMovetimeMs = 100;
inline constexpr int kGraceMs = 5000;
inline constexpr double kDefaultCpScale = 400.0;
inline constexpr double kMateStep = 1e-6;

/// Logistic win probability for the side to move: 1 / (1 + 10^(-cp/scale)).
inline double win_prob_from_cp(int cp, double scale = kDefaultCpScale)
{
    return 1.0 / (1.0 + std::pow(10.0, -static_cast<double>(cp) / scale));
}

/// Mate in n (n > 0 for the side to move) maps to 1 - 1e-6 n; mated in |n| to 1e-6 |n|.
inline double win_prob_from_mate(int n)
{
    if (n > 0)
        return 1.0 - kMateStep * n;
    return kMateStep * static_cast<double>(-n);
}

struct EvalResult {
    std::optional<int> centipawns;
    std::optional<int> mate;
    double win_prob = 0.5;
};

struct EngineOptions {
    int skill = 1;
    int movetime_ms = kDefaultMovetimeMs;
    int grace_ms = kGraceMs;
    double cp_scale = kDefaultCpScale;
};

namespace detail {

inline std::optional<int> to_int(std::string_view s)
{
    int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

inline std::vector<std::string_view> words(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ')
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace detail

/// Score from an "info ... score cp N" or "score mate N" line, if present.
inline std::optional<EvalResult> parse_info_score(std::string_view line, double cp_scale = kDefaultCpScale)
{
    const auto w = detail::words(line);
    if (w.empty() || w[0] != "info")
        return std::nullopt;
    for (std::size_t i = 1; i + 2 < w.size(); ++i) {
        if (w[i] != "score")
            continue;
        const auto v = detail::to_int(w[i + 2]);
        if (!v)
            return std::nullopt;
        EvalResult r;
        if (w[i + 1] == "cp") {
            r.centipawns = *v;
            r.win_prob = win_prob_from_cp(*v, cp_scale);
            return r;
        }
        if (w[i + 1] == "mate") {
            r.mate = *v;
            r.win_prob = win_prob_from_mate(*v);
            return r;
        }
        return std::nullopt;
    }
    return std::nullopt;
}

inline nlohmann::json to_json(const EvalResult& e)
{
    nlohmann::json j{{"win_prob", e.win_prob}};
    j["cp"] = e.centipawns ? nlohmann::json(*e.centipawns) : nlohmann::json(nullptr);
    j["mate"] = e.mate ? nlohmann::json(*e.mate) : nlohmann::json(nullptr);
    return j;
}

/// A UCI engine behind a line channel. The handshake runs in the constructor.
class UciEngine {
public:
    UciEngine(std::unique_ptr<LineChannel> channel, EngineOptions opt = {})
        : channel_(std::move(channel)), opt_(opt)
    {
        send("uci");
        wait_for("uciok", std::chrono::milliseconds(opt_.grace_ms));
        send("setoption name Skill Level value " + std::to_string(opt_.skill));
        ready();
    }

    UciEngine(const UciEngine&) = delete;
    UciEngine& operator=(const UciEngine&) = delete;

    ~UciEngine()
    {
        if (channel_)
            channel_->send("quit");
    }

    const EngineOptions& options() const noexcept { return opt_; }

    void new_game()
    {
        send("ucinewgame");
        ready();
    }

    chess::Move best_move(const chess::Position& pos, std::optional<int> movetime_ms = std::nullopt)
    {
        const int ms = movetime_ms.value_or(opt_.movetime_ms);
        const std::string reply = search(pos, ms, nullptr);
        const auto w = detail::words(reply);
        if (w.size() < 2)
            throw Error(Errc::IllegalEngineMove, "bestmove line without a move: " + reply);
        const auto m = pos.find_uci(w[1]);
        if (!m)
            throw Error(Errc::IllegalEngineMove, "engine move " + std::string(w[1]) + " is not legal in " + pos.fen());
        return *m;
    }

    /// Searches and returns the last reported score, from the side to move.
    EvalResult eval_winprob(const chess::Position& pos, std::optional<int> time_ms = std::nullopt)
    {
        const int ms = time_ms.value_or(opt_.movetime_ms);
        std::optional<EvalResult> last;
        search(pos, ms, &last);
        if (!last)
            throw Error(Errc::IllegalEngineMove, "engine reported no score");
        return *last;
    }

private:
    void send(const std::string& line)
    {
        if (!channel_->send(line))
            throw Error(Errc::EngineCrashed, "engine closed its input");
    }

    std::string wait_for(std::string_view prefix, std::chrono::milliseconds timeout,
                         std::optional<EvalResult>* score = nullptr)
    {
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            const auto r = channel_->receive(std::max(left, std::chrono::milliseconds(0)));
            if (r.status == ReadStatus::Closed)
                throw Error(Errc::EngineCrashed, "engine exited while waiting for " + std::string(prefix));
            if (r.status == ReadStatus::Timeout)
                throw Error(Errc::EngineTimeout, "no " + std::string(prefix) + " within " + std::to_string(timeout.count()) + " ms");
            if (score)
                if (auto s = parse_info_score(r.line, opt_.cp_scale))
                    *score = s;
            if (r.line == prefix || r.line.rfind(std::string(prefix) + ' ', 0) == 0)
                return r.line;
        }
    }

    void ready()
    {
        send("isready");
        wait_for("readyok", std::chrono::milliseconds(opt_.grace_ms));
    }

    std::string search(const chess::Position& pos, int ms, std::optional<EvalResult>* score)
    {
        send("position fen " + pos.fen());
        send("go movetime " + std::to_string(ms));
        return wait_for("bestmove", std::chrono::milliseconds(ms + opt_.grace_ms), score);
    }

    std::unique_ptr<LineChannel> channel_;
    EngineOptions opt_;
};

} // namespace transcend::engine
