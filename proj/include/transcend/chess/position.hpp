#pragma once

// Chess rules: board, FEN, legal move generation and perft.

#include <transcend/error.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace transcend::chess {

enum class Color : std::uint8_t { White = 0, Black = 1 };
enum class PieceType : std::uint8_t { None = 0, Pawn, Knight, Bishop, Rook, Queen, King };

constexpr Color operator!(Color c) noexcept { return c == Color::White ? Color::Black : Color::White; }

struct Piece {
    PieceType type = PieceType::None;
    Color color = Color::White;

    bool empty() const noexcept { return type == PieceType::None; }
    bool is(Color c, PieceType t) const noexcept { return type == t && color == c; }
    bool operator==(const Piece&) const = default;
};

using Square = int;  // 0 = a1, 7 = h1, 63 = h8
inline constexpr Square kNoSquare = -1;

constexpr int file_of(Square s) noexcept { return s & 7; }
constexpr int rank_of(Square s) noexcept { return s >> 3; }
constexpr Square make_square(int file, int rank) noexcept { return rank * 8 + file; }
constexpr bool on_board(int file, int rank) noexcept { return file >= 0 && file < 8 && rank >= 0 && rank < 8; }

inline std::string square_name(Square s)
{
    return {static_cast<char>('a' + file_of(s)), static_cast<char>('1' + rank_of(s))};
}

inline std::optional<Square> parse_square(std::string_view s)
{
    if (s.size() != 2 || s[0] < 'a' || s[0] > 'h' || s[1] < '1' || s[1] > '8')
        return std::nullopt;
    return make_square(s[0] - 'a', s[1] - '1');
}

inline char piece_letter(PieceType t)
{
    constexpr std::string_view letters = ".PNBRQK";
    return letters[static_cast<std::size_t>(t)];
}

inline PieceType piece_from_letter(char c)
{
    switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'P': return PieceType::Pawn;
    case 'N': return PieceType::Knight;
    case 'B': return PieceType::Bishop;
    case 'R': return PieceType::Rook;
    case 'Q': return PieceType::Queen;
    case 'K': return PieceType::King;
    default: return PieceType::None;
    }
}

enum MoveFlag : std::uint8_t {
    kQuiet = 0,
    kCapture = 1,
    kEnPassant = 2,
    kCastle = 4,
    kDoublePush = 8,
};

struct Move {
    Square from = 0;
    Square to = 0;
    PieceType promotion = PieceType::None;
    std::uint8_t flags = kQuiet;

    bool is_capture() const noexcept { return flags & kCapture; }
    bool is_castle() const noexcept { return flags & kCastle; }
    bool is_en_passant() const noexcept { return flags & kEnPassant; }

    std::string uci() const
    {
        std::string s = square_name(from) + square_name(to);
        if (promotion != PieceType::None)
            s += static_cast<char>(std::tolower(piece_letter(promotion)));
        return s;
    }

    bool operator==(const Move&) const = default;
};

enum CastleRight : std::uint8_t { kWhiteKing = 1, kWhiteQueen = 2, kBlackKing = 4, kBlackQueen = 8 };

inline constexpr std::string_view kStartFen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

namespace detail {

inline constexpr std::array<std::array<int, 2>, 8> kKnightSteps{
    {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
inline constexpr std::array<std::array<int, 2>, 8> kKingSteps{
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
inline constexpr std::array<std::array<int, 2>, 4> kRookDirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
inline constexpr std::array<std::array<int, 2>, 4> kBishopDirs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

[[noreturn]] inline void fen_error(int field, const std::string& what)
{
    throw Error(Errc::MalformedFen, "field " + std::to_string(field) + ": " + what);
}

inline std::vector<std::string_view> split_spaces(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ')
            ++i;
        const std::size_t j = s.find(' ', i);
        const std::size_t end = j == std::string_view::npos ? s.size() : j;
        if (end > i)
            out.push_back(s.substr(i, end - i));
        i = end;
    }
    return out;
}

inline std::optional<int> parse_uint(std::string_view s)
{
    int v = 0;
    if (s.empty())
        return std::nullopt;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0)
        return std::nullopt;
    return v;
}

} // namespace detail

class Position {
public:
    static Position startpos() { return from_fen(kStartFen); }

    /// Parses a six-field FEN. Failures name the offending field (0-based).
    static Position from_fen(std::string_view fen)
    {
        const auto fields = detail::split_spaces(fen);
        if (fields.size() != 6)
            detail::fen_error(static_cast<int>(std::min<std::size_t>(fields.size(), 6)),
                              "expected 6 fields, got " + std::to_string(fields.size()));
        Position p;
        // Placement, rank 8 first.
        int rank = 7;
        int file = 0;
        for (char c : fields[0]) {
            if (c == '/') {
                if (file != 8 || rank == 0)
                    detail::fen_error(0, "bad rank length");
                --rank;
                file = 0;
            } else if (c >= '1' && c <= '8') {
                file += c - '0';
                if (file > 8)
                    detail::fen_error(0, "rank overflows");
            } else {
                const PieceType t = piece_from_letter(c);
                if (t == PieceType::None || file >= 8)
                    detail::fen_error(0, std::string("bad placement character '") + c + "'");
                p.board_[static_cast<std::size_t>(make_square(file, rank))] =
                    Piece{t, std::isupper(static_cast<unsigned char>(c)) ? Color::White : Color::Black};
                ++file;
            }
        }
        if (rank != 0 || file != 8)
            detail::fen_error(0, "placement must describe 8 full ranks");

        if (fields[1] == "w")
            p.side_ = Color::White;
        else if (fields[1] == "b")
            p.side_ = Color::Black;
        else
            detail::fen_error(1, "side to move must be w or b");

        if (fields[2] != "-") {
            for (char c : fields[2]) {
                std::uint8_t bit = 0;
                switch (c) {
                case 'K': bit = kWhiteKing; break;
                case 'Q': bit = kWhiteQueen; break;
                case 'k': bit = kBlackKing; break;
                case 'q': bit = kBlackQueen; break;
                default: detail::fen_error(2, std::string("bad castling character '") + c + "'");
                }
                if (p.castling_ & bit)
                    detail::fen_error(2, "repeated castling right");
                p.castling_ |= bit;
            }
        }

        if (fields[3] != "-") {
            const auto sq = parse_square(fields[3]);
            if (!sq)
                detail::fen_error(3, "bad en-passant square");
            const int want = p.side_ == Color::White ? 5 : 2;
            if (rank_of(*sq) != want)
                detail::fen_error(3, "en-passant square on the wrong rank");
            p.ep_ = *sq;
        }

        const auto half = detail::parse_uint(fields[4]);
        if (!half)
            detail::fen_error(4, "halfmove clock must be a non-negative integer");
        p.halfmove_ = *half;
        const auto full = detail::parse_uint(fields[5]);
        if (!full || *full < 1)
            detail::fen_error(5, "fullmove number must be a positive integer");
        p.fullmove_ = *full;

        p.validate();
        return p;
    }

    std::string fen() const { return placement_fen() + ' ' + state_fen(ep_) + ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_); }

    /// Position identity without clocks; the en-passant square only counts
    /// when a legal en-passant capture exists.
    std::string key() const { return placement_fen() + ' ' + state_fen(has_legal_en_passant() ? ep_ : kNoSquare); }

    const Piece& at(Square s) const { return board_[static_cast<std::size_t>(s)]; }
    Color side_to_move() const noexcept { return side_; }
    std::uint8_t castling() const noexcept { return castling_; }
    Square en_passant() const noexcept { return ep_; }
    int halfmove_clock() const noexcept { return halfmove_; }
    int fullmove_number() const noexcept { return fullmove_; }

    Square king_square(Color c) const
    {
        for (Square s = 0; s < 64; ++s)
            if (at(s).is(c, PieceType::King))
                return s;
        return kNoSquare;
    }

    bool attacked_by(Square target, Color by) const
    {
        const int tf = file_of(target);
        const int tr = rank_of(target);
        const int pawn_rank = tr + (by == Color::White ? -1 : 1);
        for (int df : {-1, 1})
            if (on_board(tf + df, pawn_rank) && at(make_square(tf + df, pawn_rank)).is(by, PieceType::Pawn))
                return true;
        for (const auto& [df, dr] : detail::kKnightSteps)
            if (on_board(tf + df, tr + dr) && at(make_square(tf + df, tr + dr)).is(by, PieceType::Knight))
                return true;
        for (const auto& [df, dr] : detail::kKingSteps)
            if (on_board(tf + df, tr + dr) && at(make_square(tf + df, tr + dr)).is(by, PieceType::King))
                return true;
        auto ray = [&](const auto& dirs, PieceType slider) {
            for (const auto& [df, dr] : dirs) {
                int f = tf + df;
                int r = tr + dr;
                while (on_board(f, r)) {
                    const Piece& p = at(make_square(f, r));
                    if (!p.empty()) {
                        if (p.color == by && (p.type == slider || p.type == PieceType::Queen))
                            return true;
                        break;
                    }
                    f += df;
                    r += dr;
                }
            }
            return false;
        };
        return ray(detail::kRookDirs, PieceType::Rook) || ray(detail::kBishopDirs, PieceType::Bishop);
    }

    bool in_check() const { return attacked_by(king_square(side_), !side_); }

    std::vector<Move> legal_moves() const
    {
        std::vector<Move> out;
        for (const Move& m : pseudo_legal_moves()) {
            const Position next = apply(m);
            if (!next.attacked_by(next.king_square(side_), !side_))
                out.push_back(m);
        }
        return out;
    }

    bool is_legal(const Move& m) const
    {
        for (const Move& l : legal_moves())
            if (l == m)
                return true;
        return false;
    }

    /// Applies a move known to be legal (no validation).
    Position apply(const Move& m) const
    {
        Position p = *this;
        const Piece mover = at(m.from);
        const bool capture = !at(m.to).empty() || m.is_en_passant();
        p.board_[static_cast<std::size_t>(m.to)] = mover;
        p.board_[static_cast<std::size_t>(m.from)] = Piece{};
        if (m.is_en_passant())
            p.board_[static_cast<std::size_t>(make_square(file_of(m.to), rank_of(m.from)))] = Piece{};
        if (m.promotion != PieceType::None)
            p.board_[static_cast<std::size_t>(m.to)].type = m.promotion;
        if (m.is_castle()) {
            const int r = rank_of(m.from);
            const bool king_side = file_of(m.to) == 6;
            const Square rook_from = make_square(king_side ? 7 : 0, r);
            const Square rook_to = make_square(king_side ? 5 : 3, r);
            p.board_[static_cast<std::size_t>(rook_to)] = p.board_[static_cast<std::size_t>(rook_from)];
            p.board_[static_cast<std::size_t>(rook_from)] = Piece{};
        }
        auto clear_for = [&](Square s) {
            if (s == make_square(0, 0)) p.castling_ &= ~kWhiteQueen;
            if (s == make_square(7, 0)) p.castling_ &= ~kWhiteKing;
            if (s == make_square(0, 7)) p.castling_ &= ~kBlackQueen;
            if (s == make_square(7, 7)) p.castling_ &= ~kBlackKing;
        };
        if (mover.type == PieceType::King)
            p.castling_ &= side_ == Color::White ? ~(kWhiteKing | kWhiteQueen) : ~(kBlackKing | kBlackQueen);
        clear_for(m.from);
        clear_for(m.to);
        p.ep_ = kNoSquare;
        if (m.flags & kDoublePush)
            p.ep_ = make_square(file_of(m.from), (rank_of(m.from) + rank_of(m.to)) / 2);
        p.halfmove_ = (mover.type == PieceType::Pawn || capture) ? 0 : halfmove_ + 1;
        if (side_ == Color::Black)
            ++p.fullmove_;
        p.side_ = !side_;
        return p;
    }

    /// Applies `m` after checking it is legal here.
    Position play(const Move& m) const
    {
        if (!is_legal(m))
            throw Error(Errc::IllegalMove, "illegal move " + m.uci() + " in " + fen());
        return apply(m);
    }

    std::optional<Move> find_uci(std::string_view uci) const
    {
        for (const Move& m : legal_moves())
            if (m.uci() == uci)
                return m;
        return std::nullopt;
    }

    bool is_checkmate() const { return in_check() && legal_moves().empty(); }
    bool is_stalemate() const { return !in_check() && legal_moves().empty(); }

    /// K v K, K+minor v K, and K+B v K+B with same-coloured bishops.
    bool insufficient_material() const
    {
        int minors = 0;
        int bishops_light = 0;
        int bishops_dark = 0;
        for (Square s = 0; s < 64; ++s) {
            const Piece& p = at(s);
            switch (p.type) {
            case PieceType::None:
            case PieceType::King: break;
            case PieceType::Knight: ++minors; break;
            case PieceType::Bishop:
                ++minors;
                ((file_of(s) + rank_of(s)) % 2 ? bishops_light : bishops_dark)++;
                break;
            default: return false;
            }
        }
        if (minors <= 1)
            return true;
        return minors == bishops_light || minors == bishops_dark;
    }

    bool operator==(const Position&) const = default;

private:
    std::vector<Move> pseudo_legal_moves() const
    {
        std::vector<Move> out;
        out.reserve(64);
        for (Square s = 0; s < 64; ++s) {
            const Piece& p = at(s);
            if (p.empty() || p.color != side_)
                continue;
            switch (p.type) {
            case PieceType::Pawn: pawn_moves(s, out); break;
            case PieceType::Knight: step_moves(s, detail::kKnightSteps, out); break;
            case PieceType::Bishop: slide_moves(s, detail::kBishopDirs, out); break;
            case PieceType::Rook: slide_moves(s, detail::kRookDirs, out); break;
            case PieceType::Queen:
                slide_moves(s, detail::kBishopDirs, out);
                slide_moves(s, detail::kRookDirs, out);
                break;
            case PieceType::King:
                step_moves(s, detail::kKingSteps, out);
                castle_moves(s, out);
                break;
            case PieceType::None: break;
            }
        }
        return out;
    }

    void add_pawn_move(Square from, Square to, std::uint8_t flags, std::vector<Move>& out) const
    {
        const int last = side_ == Color::White ? 7 : 0;
        if (rank_of(to) == last) {
            for (PieceType t : {PieceType::Queen, PieceType::Rook, PieceType::Bishop, PieceType::Knight})
                out.push_back({from, to, t, flags});
        } else {
            out.push_back({from, to, PieceType::None, flags});
        }
    }

    void pawn_moves(Square s, std::vector<Move>& out) const
    {
        const int dir = side_ == Color::White ? 1 : -1;
        const int start = side_ == Color::White ? 1 : 6;
        const int f = file_of(s);
        const int r = rank_of(s);
        if (on_board(f, r + dir) && at(make_square(f, r + dir)).empty()) {
            add_pawn_move(s, make_square(f, r + dir), kQuiet, out);
            if (r == start && at(make_square(f, r + 2 * dir)).empty())
                out.push_back({s, make_square(f, r + 2 * dir), PieceType::None, kDoublePush});
        }
        for (int df : {-1, 1}) {
            if (!on_board(f + df, r + dir))
                continue;
            const Square to = make_square(f + df, r + dir);
            const Piece& target = at(to);
            if (!target.empty() && target.color != side_)
                add_pawn_move(s, to, kCapture, out);
            else if (to == ep_ && target.empty())
                out.push_back({s, to, PieceType::None, static_cast<std::uint8_t>(kCapture | kEnPassant)});
        }
    }

    template <class Steps>
    void step_moves(Square s, const Steps& steps, std::vector<Move>& out) const
    {
        for (const auto& [df, dr] : steps) {
            const int f = file_of(s) + df;
            const int r = rank_of(s) + dr;
            if (!on_board(f, r))
                continue;
            const Piece& target = at(make_square(f, r));
            if (target.empty())
                out.push_back({s, make_square(f, r)});
            else if (target.color != side_)
                out.push_back({s, make_square(f, r), PieceType::None, kCapture});
        }
    }

    template <class Dirs>
    void slide_moves(Square s, const Dirs& dirs, std::vector<Move>& out) const
    {
        for (const auto& [df, dr] : dirs) {
            int f = file_of(s) + df;
            int r = rank_of(s) + dr;
            while (on_board(f, r)) {
                const Piece& target = at(make_square(f, r));
                if (target.empty()) {
                    out.push_back({s, make_square(f, r)});
                } else {
                    if (target.color != side_)
                        out.push_back({s, make_square(f, r), PieceType::None, kCapture});
                    break;
                }
                f += df;
                r += dr;
            }
        }
    }

    void castle_moves(Square s, std::vector<Move>& out) const
    {
        const int r = side_ == Color::White ? 0 : 7;
        if (s != make_square(4, r))
            return;
        const std::uint8_t ks = side_ == Color::White ? kWhiteKing : kBlackKing;
        const std::uint8_t qs = side_ == Color::White ? kWhiteQueen : kBlackQueen;
        const Color them = !side_;
        auto empty = [&](int f) { return at(make_square(f, r)).empty(); };
        auto safe = [&](int f) { return !attacked_by(make_square(f, r), them); };
        if ((castling_ & ks) && at(make_square(7, r)).is(side_, PieceType::Rook) && empty(5) && empty(6) && safe(4)
            && safe(5) && safe(6))
            out.push_back({s, make_square(6, r), PieceType::None, kCastle});
        if ((castling_ & qs) && at(make_square(0, r)).is(side_, PieceType::Rook) && empty(3) && empty(2) && empty(1)
            && safe(4) && safe(3) && safe(2))
            out.push_back({s, make_square(2, r), PieceType::None, kCastle});
    }

    bool has_legal_en_passant() const
    {
        if (ep_ == kNoSquare)
            return false;
        for (const Move& m : legal_moves())
            if (m.is_en_passant())
                return true;
        return false;
    }

    std::string placement_fen() const
    {
        std::string s;
        for (int r = 7; r >= 0; --r) {
            int gap = 0;
            for (int f = 0; f < 8; ++f) {
                const Piece& p = at(make_square(f, r));
                if (p.empty()) {
                    ++gap;
                    continue;
                }
                if (gap)
                    s += static_cast<char>('0' + gap);
                gap = 0;
                const char c = piece_letter(p.type);
                s += p.color == Color::White ? c : static_cast<char>(std::tolower(c));
            }
            if (gap)
                s += static_cast<char>('0' + gap);
            if (r)
                s += '/';
        }
        return s;
    }

    std::string state_fen(Square ep) const
    {
        std::string s(1, side_ == Color::White ? 'w' : 'b');
        s += ' ';
        if (castling_ == 0)
            s += '-';
        if (castling_ & kWhiteKing) s += 'K';
        if (castling_ & kWhiteQueen) s += 'Q';
        if (castling_ & kBlackKing) s += 'k';
        if (castling_ & kBlackQueen) s += 'q';
        s += ' ';
        s += ep == kNoSquare ? std::string("-") : square_name(ep);
        return s;
    }

    void validate() const
    {
        int kings[2] = {0, 0};
        for (Square s = 0; s < 64; ++s) {
            const Piece& p = at(s);
            if (p.type == PieceType::King)
                ++kings[static_cast<int>(p.color)];
            if (p.type == PieceType::Pawn && (rank_of(s) == 0 || rank_of(s) == 7))
                detail::fen_error(0, "pawn on a back rank");
        }
        if (kings[0] != 1 || kings[1] != 1)
            detail::fen_error(0, "each side needs exactly one king");
        if (attacked_by(king_square(!side_), side_))
            detail::fen_error(1, "side not to move is in check");
        auto need = [&](std::uint8_t bit, Square king, Square rook, Color c) {
            if ((castling_ & bit) && !(at(king).is(c, PieceType::King) && at(rook).is(c, PieceType::Rook)))
                detail::fen_error(2, "castling right without king and rook on their squares");
        };
        need(kWhiteKing, make_square(4, 0), make_square(7, 0), Color::White);
        need(kWhiteQueen, make_square(4, 0), make_square(0, 0), Color::White);
        need(kBlackKing, make_square(4, 7), make_square(7, 7), Color::Black);
        need(kBlackQueen, make_square(4, 7), make_square(0, 7), Color::Black);
        if (ep_ != kNoSquare) {
            const int dir = side_ == Color::White ? -1 : 1;  // towards the pawn that just moved
            const Square pawn = make_square(file_of(ep_), rank_of(ep_) + dir);
            const Square origin = make_square(file_of(ep_), rank_of(ep_) - dir);
            if (!at(pawn).is(!side_, PieceType::Pawn) || !at(ep_).empty() || !at(origin).empty())
                detail::fen_error(3, "en-passant square without a pawn that just advanced two squares");
        }
    }

    std::array<Piece, 64> board_{};
    Color side_ = Color::White;
    std::uint8_t castling_ = 0;
    Square ep_ = kNoSquare;
    int halfmove_ = 0;
    int fullmove_ = 1;
};

inline std::uint64_t perft(const Position& p, int depth)
{
    if (depth == 0)
        return 1;
    const auto moves = p.legal_moves();
    if (depth == 1)
        return moves.size();
    std::uint64_t n = 0;
    for (const Move& m : moves)
        n += perft(p.apply(m), depth - 1);
    return n;
}

} // namespace transcend::chess
