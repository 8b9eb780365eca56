#pragma once

// Solved tic-tac-toe: boards, exact minimax values, the move-reward table,
// rollouts, visitation sampling and exact forward dynamic programming.

#include <transcend/error.hpp>
#include <transcend/experts.hpp>
#include <transcend/random.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace transcend::ttt {

enum class Cell : std::uint8_t { Empty = 0, X = 1, O = 2 };
enum class Side : std::uint8_t { X, O };

constexpr Side other(Side s) noexcept { return s == Side::X ? Side::O : Side::X; }
constexpr Cell mark(Side s) noexcept { return s == Side::X ? Cell::X : Cell::O; }
constexpr char to_char(Side s) noexcept { return s == Side::X ? 'X' : 'O'; }

inline constexpr std::size_t kCells = 9;
inline constexpr std::uint32_t kKeySpace = 19683;  // 3^9

inline constexpr std::array<std::array<int, 3>, 8> kLines{{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6},
}};

class Board {
public:
    Board() { cells_.fill(Cell::Empty); }

    /// Nine characters from {X, O, .}, row-major from the top-left cell.
    static Board parse(std::string_view s)
    {
        if (s.size() != kCells)
            throw Error(Errc::InvalidInstance, "board string must have 9 cells");
        Board b;
        for (std::size_t i = 0; i < kCells; ++i) {
            switch (s[i]) {
            case 'X': case 'x': b.cells_[i] = Cell::X; break;
            case 'O': case 'o': b.cells_[i] = Cell::O; break;
            case '.': case '-': case ' ': b.cells_[i] = Cell::Empty; break;
            default: throw Error(Errc::InvalidInstance, "bad board character");
            }
        }
        if (!b.valid())
            throw Error(Errc::InvalidInstance, "board is not a reachable position: " + std::string(s));
        return b;
    }

    static Board from_key(std::uint32_t key)
    {
        if (key >= kKeySpace)
            throw Error(Errc::IndexOutOfRange, "board key out of range");
        Board b;
        for (std::size_t i = 0; i < kCells; ++i) {
            b.cells_[i] = static_cast<Cell>(key % 3);
            key /= 3;
        }
        return b;
    }

    std::uint32_t key() const noexcept
    {
        std::uint32_t k = 0;
        for (std::size_t i = kCells; i-- > 0;)
            k = k * 3 + static_cast<std::uint32_t>(cells_[i]);
        return k;
    }

    Cell operator[](std::size_t i) const { return cells_[i]; }
    const std::array<Cell, kCells>& cells() const noexcept { return cells_; }

    int count(Cell c) const noexcept
    {
        int n = 0;
        for (Cell v : cells_)
            n += v == c;
        return n;
    }

    int ply() const noexcept { return count(Cell::X) + count(Cell::O); }
    Side side_to_move() const noexcept { return count(Cell::X) == count(Cell::O) ? Side::X : Side::O; }

    bool has_line(Cell c) const noexcept
    {
        for (const auto& l : kLines)
            if (cells_[l[0]] == c && cells_[l[1]] == c && cells_[l[2]] == c)
                return true;
        return false;
    }

    std::optional<Side> winner() const noexcept
    {
        if (has_line(Cell::X))
            return Side::X;
        if (has_line(Cell::O))
            return Side::O;
        return std::nullopt;
    }

    bool full() const noexcept { return ply() == static_cast<int>(kCells); }
    bool terminal() const noexcept { return full() || winner().has_value(); }

    /// Piece counts consistent with alternating play from X, and at most one
    /// side has a line, which must have been completed by the last move.
    bool valid() const noexcept
    {
        const int x = count(Cell::X);
        const int o = count(Cell::O);
        if (x - o != 0 && x - o != 1)
            return false;
        const bool xl = has_line(Cell::X);
        const bool ol = has_line(Cell::O);
        if (xl && ol)
            return false;
        if (xl && x != o + 1)
            return false;
        if (ol && x != o)
            return false;
        return true;
    }

    bool is_empty(int cell) const { return cells_.at(static_cast<std::size_t>(cell)) == Cell::Empty; }

    Board play(int cell) const
    {
        if (terminal())
            throw Error(Errc::TerminalState, "no moves in a finished game");
        if (cell < 0 || cell >= static_cast<int>(kCells) || !is_empty(cell))
            throw Error(Errc::IllegalMove, "cell " + std::to_string(cell) + " is not playable");
        Board b = *this;
        b.cells_[static_cast<std::size_t>(cell)] = mark(side_to_move());
        return b;
    }

    std::string str() const
    {
        std::string s;
        for (Cell c : cells_)
            s += c == Cell::X ? 'X' : c == Cell::O ? 'O' : '.';
        return s;
    }

    bool operator==(const Board&) const = default;

private:
    std::array<Cell, kCells> cells_;
};

inline std::vector<int> legal_moves(const Board& b)
{
    if (b.terminal())
        throw Error(Errc::TerminalState, "no legal moves in a finished game: " + b.str());
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(kCells); ++i)
        if (b.is_empty(i))
            out.push_back(i);
    return out;
}

/// Exact game values for every reachable position, computed once on
/// construction and read-only afterwards.
class Solver {
public:
    Solver() : value_(kKeySpace, kUnknown)
    {
        solve(Board{});
        for (std::uint32_t k = 0; k < kKeySpace; ++k)
            if (value_[k] != kUnknown)
                reachable_.push_back(k);
    }

    /// Value under perfect play from the perspective of the side to move:
    /// +1 win, 0 draw, -1 loss.
    int value(const Board& b) const
    {
        const auto v = value_[b.key()];
        if (v == kUnknown)
            throw Error(Errc::InvalidInstance, "position not reachable: " + b.str());
        return v;
    }

    /// Reward of `cell` for the mover: loss 0, draw 0.5, win 1.
    double reward_of_move(const Board& b, int cell) const
    {
        const Board next = b.play(cell);
        if (next.winner())
            return 1.0;
        return (1.0 - static_cast<double>(value(next))) / 2.0;
    }

    bool reachable(const Board& b) const noexcept { return value_[b.key()] != kUnknown; }
    const std::vector<std::uint32_t>& reachable_keys() const noexcept { return reachable_; }

private:
    static constexpr std::int8_t kUnknown = 2;

    std::int8_t solve(const Board& b)
    {
        auto& slot = value_[b.key()];
        if (slot != kUnknown)
            return slot;
        std::int8_t v;
        if (b.winner())
            v = -1;  // the previous mover completed a line
        else if (b.full())
            v = 0;
        else {
            v = -1;
            for (int m : legal_moves(b))
                v = std::max<std::int8_t>(v, static_cast<std::int8_t>(-solve(b.play(m))));
        }
        value_[b.key()] = v;
        return v;
    }

    std::vector<std::int8_t> value_;
    std::vector<std::uint32_t> reachable_;
};

/// The decision problem over nonterminal positions: inputs are dense state ids
/// in ascending ply then key order, outputs are the nine cells.
class Game {
public:
    Game() : index_(kKeySpace, kNone)
    {
        std::vector<std::uint32_t> keys;
        for (std::uint32_t k : solver_.reachable_keys())
            if (!Board::from_key(k).terminal())
                keys.push_back(k);
        std::stable_sort(keys.begin(), keys.end(), [](std::uint32_t a, std::uint32_t b) {
            return Board::from_key(a).ply() < Board::from_key(b).ply();
        });
        states_ = std::move(keys);
        std::vector<double> rewards(states_.size() * kCells, 0.0);
        std::vector<std::uint8_t> legal(states_.size() * kCells, 0);
        for (std::size_t id = 0; id < states_.size(); ++id) {
            index_[states_[id]] = static_cast<std::int32_t>(id);
            const Board b = Board::from_key(states_[id]);
            for (int m : legal_moves(b)) {
                rewards[id * kCells + static_cast<std::size_t>(m)] = solver_.reward_of_move(b, m);
                legal[id * kCells + static_cast<std::size_t>(m)] = 1;
            }
        }
        table_ = RewardTable(states_.size(), kCells, std::move(rewards), std::move(legal));
    }

    const Solver& solver() const noexcept { return solver_; }
    const RewardTable& table() const noexcept { return table_; }
    std::size_t num_states() const noexcept { return states_.size(); }

    std::size_t id_of(const Board& b) const
    {
        const auto i = index_[b.key()];
        if (i == kNone)
            throw Error(b.terminal() ? Errc::TerminalState : Errc::InvalidInstance,
                        "no decision state for board " + b.str());
        return static_cast<std::size_t>(i);
    }

    Board board(std::size_t id) const { return Board::from_key(states_.at(id)); }

private:
    static constexpr std::int32_t kNone = -1;

    Solver solver_;
    std::vector<std::uint32_t> states_;
    std::vector<std::int32_t> index_;
    RewardTable table_;
};

inline const Game& game()
{
    static const Game g;
    return g;
}

inline Policy perfect_player(const Game& g = game()) { return optimal_expert(g.table()).relabeled("perfect"); }
inline Policy uniform_player(const Game& g = game()) { return uniform_policy(g.table()).relabeled("uniform"); }

inline std::string rho_label(double rho)
{
    return "rho=" + temperature_label(Temperature(rho));
}

/// Noisy experts over the move-reward table; tie sets of optimal moves share
/// the non-noise mass uniformly.
inline std::vector<Policy> build_expert_cohort(std::span<const double> rhos, const Game& g = game())
{
    std::vector<Policy> out;
    for (double rho : rhos)
        out.push_back(noisy_expert(g.table(), rho).relabeled(rho_label(rho)));
    return out;
}

/// The acting distribution at a board: the policy row restricted to legal
/// cells and renormalized, uniform over legal cells if that mass is zero.
inline std::vector<double> move_weights(const Game& g, const Policy& policy, const Board& b)
{
    const std::size_t id = g.id_of(b);
    const Dist& row = policy(id);
    std::vector<double> w(kCells, 0.0);
    double mass = 0.0;
    for (std::size_t c = 0; c < kCells; ++c)
        if (b[c] == Cell::Empty) {
            w[c] = row[c];
            mass += row[c];
        }
    if (!(mass > 0.0)) {
        for (std::size_t c = 0; c < kCells; ++c)
            w[c] = b[c] == Cell::Empty ? 1.0 : 0.0;
        mass = static_cast<double>(kCells - static_cast<std::size_t>(b.ply()));
    }
    for (double& v : w)
        v /= mass;
    return w;
}

struct Trajectory {
    std::vector<std::pair<Board, int>> steps;
    char outcome = 'D';  // 'X', 'O' or 'D'

    std::string dump() const
    {
        std::string s;
        for (const auto& [b, m] : steps) {
            s += std::to_string(m);
            s += ' ';
        }
        s += outcome;
        return s;
    }
};

inline char outcome_of(const Board& b)
{
    if (auto w = b.winner())
        return to_char(*w);
    return 'D';
}

inline Trajectory rollout(const Policy& x_player, const Policy& o_player, Rng& rng, const Game& g = game())
{
    Trajectory t;
    Board b;
    while (!b.terminal()) {
        const Policy& mover = b.side_to_move() == Side::X ? x_player : o_player;
        const auto w = move_weights(g, mover, b);
        const int m = static_cast<int>(rng.categorical(w));
        t.steps.emplace_back(b, m);
        b = b.play(m);
    }
    t.outcome = outcome_of(b);
    return t;
}

/// Score for `seat` from a finished game: 1 win, 0.5 draw, 0 loss.
inline double score_for(char outcome, Side seat)
{
    if (outcome == 'D')
        return 0.5;
    return outcome == to_char(seat) ? 1.0 : 0.0;
}

enum class Seat { X, O, Alternate };

/// Dense ids of the states where `policy` was to move, over n games against
/// `opponent`. Alternate seating gives the policy X in even games.
inline std::vector<std::size_t> visitation_sample(const Policy& policy, const Policy& opponent, std::size_t n_games,
                                                  Rng& rng, Seat seat = Seat::X, const Game& g = game())
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_games; ++i) {
        const Side side = seat == Seat::X ? Side::X : seat == Seat::O ? Side::O : (i % 2 == 0 ? Side::X : Side::O);
        const Trajectory t =
            side == Side::X ? rollout(policy, opponent, rng, g) : rollout(opponent, policy, rng, g);
        for (const auto& [b, m] : t.steps)
            if (b.side_to_move() == side)
                out.push_back(g.id_of(b));
    }
    return out;
}

/// Exact results of one game between two policies.
struct ExactPlay {
    double x_win = 0.0;
    double o_win = 0.0;
    double draw = 0.0;
    std::vector<double> reach;  // probability of reaching each decision state

    double score(Side seat) const { return (seat == Side::X ? x_win : o_win) + 0.5 * draw; }
};

inline ExactPlay exact_play(const Policy& x_player, const Policy& o_player, const Game& g = game())
{
    ExactPlay r;
    r.reach.assign(g.num_states(), 0.0);
    r.reach[g.id_of(Board{})] = 1.0;
    // Ids are in ascending ply, so every predecessor is final before use.
    for (std::size_t id = 0; id < g.num_states(); ++id) {
        const double p = r.reach[id];
        if (p == 0.0)
            continue;
        const Board b = g.board(id);
        const Policy& mover = b.side_to_move() == Side::X ? x_player : o_player;
        const auto w = move_weights(g, mover, b);
        for (int m = 0; m < static_cast<int>(kCells); ++m) {
            const double q = w[static_cast<std::size_t>(m)];
            if (q == 0.0)
                continue;
            const Board next = b.play(m);
            if (next.terminal()) {
                const char o = outcome_of(next);
                (o == 'X' ? r.x_win : o == 'O' ? r.o_win : r.draw) += p * q;
            } else {
                r.reach[g.id_of(next)] += p * q;
            }
        }
    }
    return r;
}

/// Mean score over both seats against a fixed opponent, computed exactly.
inline double expected_score(const Policy& policy, const Policy& opponent, const Game& g = game())
{
    return 0.5 * (exact_play(policy, opponent, g).score(Side::X) + exact_play(opponent, policy, g).score(Side::O));
}

/// Exact state-visitation distribution d^f of `policy` against `opponent`,
/// normalized over the states where the policy moves.
inline std::vector<double> exact_visitation(const Policy& policy, const Policy& opponent, Seat seat = Seat::X,
                                            const Game& g = game())
{
    std::vector<double> d(g.num_states(), 0.0);
    auto add = [&](const ExactPlay& play, Side side, double weight) {
        for (std::size_t id = 0; id < g.num_states(); ++id)
            if (g.board(id).side_to_move() == side)
                d[id] += weight * play.reach[id];
    };
    if (seat != Seat::O)
        add(exact_play(policy, opponent, g), Side::X, seat == Seat::Alternate ? 0.5 : 1.0);
    if (seat != Seat::X)
        add(exact_play(opponent, policy, g), Side::O, seat == Seat::Alternate ? 0.5 : 1.0);
    double total = 0.0;
    for (double v : d)
        total += v;
    for (double& v : d)
        v /= total;
    return d;
}

} // namespace transcend::ttt
