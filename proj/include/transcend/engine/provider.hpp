#pragma once

// The policy-provider line protocol ("POS <movetext>" / "MOVE <san>") and a
// few in-process providers.

#include <transcend/chess/pgn.hpp>
#include <transcend/dist.hpp>
#include <transcend/engine/channel.hpp>
#include <transcend/random.hpp>

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace transcend::engine {

inline constexpr std::chrono::milliseconds kProviderTimeout{10000};

/// Movetext in the compact prompt form, e.g. "1.e4 e5 2.Nf3".
inline std::string prompt_movetext(const std::vector<std::string>& sans)
{
    std::string out;
    for (std::size_t i = 0; i < sans.size(); ++i) {
        if (i)
            out += ' ';
        if (i % 2 == 0)
            out += std::to_string(i / 2 + 1) + '.';
        out += sans[i];
    }
    return out;
}

/// Position reached by a prompt movetext from the standard start.
inline chess::Position replay_movetext(std::string_view movetext)
{
    const auto r = chess::parse_pgn(std::string(movetext) + " *");
    if (!r.errors.empty())
        throw Error(r.errors.front().code, r.errors.front().message);
    if (r.games.empty())
        return chess::Position::startpos();
    return r.games.front().replay().back();
}

/// Sends one request and returns the SAN of the reply.
inline std::string provider_request(LineChannel& channel, std::string_view movetext,
                                    std::chrono::milliseconds timeout = kProviderTimeout)
{
    if (!channel.send("POS " + std::string(movetext)))
        throw Error(Errc::ProviderUnreachable, "provider closed its input");
    const ReadResult r = channel.receive(timeout);
    if (r.status == ReadStatus::Closed)
        throw Error(Errc::ProviderUnreachable, "provider exited");
    if (r.status == ReadStatus::Timeout)
        throw Error(Errc::ProviderTimeout, "no reply within " + std::to_string(timeout.count()) + " ms");
    if (r.line.size() <= 5 || r.line.compare(0, 5, "MOVE ") != 0)
        throw Error(Errc::MalformedReply, "unexpected provider reply: " + r.line);
    return r.line.substr(5);
}

/// Move frequencies per position, read from a PGN corpus.
class TabularChessPolicy {
public:
    void add_game(const chess::PgnGame& g)
    {
        chess::Position pos = g.start();
        for (const std::string& san : g.moves) {
            const chess::Move m = chess::parse_san(pos, san);
            ++counts_[pos.key()][m.uci()];
            pos = pos.apply(m);
        }
    }

    static TabularChessPolicy from_games(std::span<const chess::PgnGame> games)
    {
        TabularChessPolicy p;
        for (const auto& g : games)
            p.add_game(g);
        return p;
    }

    std::size_t num_states() const noexcept { return counts_.size(); }
    bool knows(const chess::Position& pos) const { return counts_.count(pos.key()) > 0; }

    /// Distribution over pos.legal_moves(): observed frequencies tempered with
    /// `tau`, uniform where the position was never seen.
    Dist distribution(const chess::Position& pos, const std::vector<chess::Move>& legal, Temperature tau = Temperature(1.0),
                      TemperScheme scheme = TemperScheme::PowerOnProbs) const
    {
        std::vector<double> w(legal.size(), 0.0);
        if (auto it = counts_.find(pos.key()); it != counts_.end())
            for (std::size_t i = 0; i < legal.size(); ++i)
                if (auto c = it->second.find(legal[i].uci()); c != it->second.end())
                    w[i] = static_cast<double>(c->second);
        bool any = false;
        for (double v : w)
            any = any || v > 0.0;
        if (!any)
            return Dist::uniform(legal.size());
        return temper(normalize(w), tau, scheme);
    }

    chess::Move sample(const chess::Position& pos, Rng& rng, Temperature tau = Temperature(1.0)) const
    {
        const auto legal = pos.legal_moves();
        if (legal.empty())
            throw Error(Errc::TerminalState, "no legal moves");
        const Dist d = distribution(pos, legal, tau);
        return legal[rng.categorical(d.probs())];
    }

private:
    std::map<std::string, std::map<std::string, std::uint64_t>> counts_;
};

/// Provider handler wrapping a move chooser; malformed prompts get "ERROR".
template <class Choose>
std::unique_ptr<FunctionChannel> provider_channel(Choose choose)
{
    return std::make_unique<FunctionChannel>([choose = std::move(choose)](std::string_view line) mutable {
        if (line.size() < 3 || line.substr(0, 3) != "POS")
            return std::vector<std::string>{"ERROR expected POS"};
        const std::string_view text = line.size() > 4 ? line.substr(4) : std::string_view{};
        try {
            const chess::Position pos = replay_movetext(text);
            if (pos.legal_moves().empty())
                return std::vector<std::string>{"ERROR game is over"};
            return std::vector<std::string>{"MOVE " + choose(pos)};
        } catch (const Error& e) {
            return std::vector<std::string>{std::string("ERROR ") + e.what()};
        }
    });
}

inline std::unique_ptr<FunctionChannel> random_legal_provider(std::uint64_t seed)
{
    return provider_channel([rng = Rng(seed)](const chess::Position& pos) mutable {
        const auto legal = pos.legal_moves();
        return chess::to_san(pos, legal[rng.below(legal.size())]);
    });
}

inline std::unique_ptr<FunctionChannel> tabular_provider(TabularChessPolicy policy, Temperature tau, std::uint64_t seed)
{
    return provider_channel([policy = std::move(policy), tau, rng = Rng(seed)](const chess::Position& pos) mutable {
        return chess::to_san(pos, policy.sample(pos, rng, tau));
    });
}

/// Replies with something that never parses as a legal move.
inline std::unique_ptr<FunctionChannel> garbage_provider()
{
    return std::make_unique<FunctionChannel>([n = 0](std::string_view) mutable {
        return std::vector<std::string>{++n % 2 ? "MOVE Zz9" : "RESIGN"};
    });
}

} // namespace transcend::engine
