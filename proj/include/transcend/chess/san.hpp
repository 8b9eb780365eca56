#pragma once

#include <transcend/chess/position.hpp>

#include <string>
#include <string_view>
#include <utility>

namespace transcend::chess {

/// Standard algebraic notation for a legal move, with +/# suffix.
inline std::string to_san(const Position& pos, const Move& m)
{
    std::string s;
    const Piece mover = pos.at(m.from);
    if (m.is_castle()) {
        s = file_of(m.to) == 6 ? "O-O" : "O-O-O";
    } else if (mover.type == PieceType::Pawn) {
        if (m.is_capture()) {
            s += static_cast<char>('a' + file_of(m.from));
            s += 'x';
        }
        s += square_name(m.to);
        if (m.promotion != PieceType::None) {
            s += '=';
            s += piece_letter(m.promotion);
        }
    } else {
        s += piece_letter(mover.type);
        bool clash = false;
        bool same_file = false;
        bool same_rank = false;
        for (const Move& o : pos.legal_moves()) {
            if (o.to != m.to || o.from == m.from || pos.at(o.from).type != mover.type)
                continue;
            clash = true;
            same_file = same_file || file_of(o.from) == file_of(m.from);
            same_rank = same_rank || rank_of(o.from) == rank_of(m.from);
        }
        if (clash) {
            if (!same_file)
                s += static_cast<char>('a' + file_of(m.from));
            else if (!same_rank)
                s += static_cast<char>('1' + rank_of(m.from));
            else
                s += square_name(m.from);
        }
        if (m.is_capture())
            s += 'x';
        s += square_name(m.to);
    }
    const Position next = pos.apply(m);
    if (next.in_check())
        s += next.legal_moves().empty() ? '#' : '+';
    return s;
}

namespace detail {

struct SanParts {
    bool castle_king = false;
    bool castle_queen = false;
    PieceType piece = PieceType::Pawn;
    int from_file = -1;
    int from_rank = -1;
    bool capture = false;
    Square to = kNoSquare;
    PieceType promotion = PieceType::None;
    char suffix = 0;  // '+', '#' or 0
};

[[noreturn]] inline void malformed(std::string_view san, const char* why)
{
    throw Error(Errc::MalformedSan, "'" + std::string(san) + "': " + why);
}

inline SanParts parse_san_syntax(std::string_view san)
{
    SanParts p;
    std::string_view s = san;
    if (!s.empty() && (s.back() == '+' || s.back() == '#')) {
        p.suffix = s.back();
        s.remove_suffix(1);
    }
    if (s.empty())
        malformed(san, "empty");
    if (s == "O-O" || s == "O-O-O") {
        (s.size() == 3 ? p.castle_king : p.castle_queen) = true;
        return p;
    }
    std::size_t i = 0;
    if (std::string_view("KQRBN").find(s[0]) != std::string_view::npos) {
        p.piece = piece_from_letter(s[0]);
        ++i;
    }
    // Promotion suffix.
    if (s.size() >= 2 && s[s.size() - 2] == '=') {
        p.promotion = piece_from_letter(s.back());
        if (p.promotion == PieceType::None || p.promotion == PieceType::Pawn || p.promotion == PieceType::King
            || p.piece != PieceType::Pawn)
            malformed(san, "bad promotion");
        s.remove_suffix(2);
    }
    if (s.size() < i + 2)
        malformed(san, "missing destination");
    const auto dest = parse_square(s.substr(s.size() - 2));
    if (!dest)
        malformed(san, "bad destination square");
    p.to = *dest;
    std::string_view mid = s.substr(i, s.size() - 2 - i);
    if (!mid.empty() && mid.back() == 'x') {
        p.capture = true;
        mid.remove_suffix(1);
    }
    if (mid.size() > 2)
        malformed(san, "bad disambiguation");
    for (char c : mid) {
        if (c >= 'a' && c <= 'h' && p.from_file < 0 && p.from_rank < 0)
            p.from_file = c - 'a';
        else if (c >= '1' && c <= '8' && p.from_rank < 0)
            p.from_rank = c - '1';
        else
            malformed(san, "bad disambiguation");
    }
    if (p.piece == PieceType::Pawn) {
        if (p.from_rank >= 0 || (p.capture != (p.from_file >= 0)))
            malformed(san, "bad pawn move shape");
    }
    return p;
}

} // namespace detail

/// Resolves SAN to the unique legal move it denotes.
inline Move parse_san(const Position& pos, std::string_view san)
{
    const auto p = detail::parse_san_syntax(san);
    std::optional<Move> found;
    int matches = 0;
    for (const Move& m : pos.legal_moves()) {
        const Piece mover = pos.at(m.from);
        bool ok;
        if (p.castle_king || p.castle_queen)
            ok = m.is_castle() && (file_of(m.to) == 6) == p.castle_king;
        else
            ok = !m.is_castle() && mover.type == p.piece && m.to == p.to && m.promotion == p.promotion
                && m.is_capture() == p.capture && (p.from_file < 0 || file_of(m.from) == p.from_file)
                && (p.from_rank < 0 || rank_of(m.from) == p.from_rank);
        if (ok) {
            ++matches;
            found = m;
        }
    }
    if (matches == 0)
        throw Error(Errc::IllegalSan, "'" + std::string(san) + "' is not legal in " + pos.fen());
    if (matches > 1)
        throw Error(Errc::AmbiguousSan, "'" + std::string(san) + "' matches " + std::to_string(matches) + " moves");
    if (p.suffix) {
        const Position next = pos.apply(*found);
        const bool check = next.in_check();
        const bool mate = check && next.legal_moves().empty();
        if ((p.suffix == '+' && (!check || mate)) || (p.suffix == '#' && !mate))
            throw Error(Errc::IllegalSan, "'" + std::string(san) + "' has the wrong check suffix");
    }
    return *found;
}

inline std::pair<Position, Move> apply_san(const Position& pos, std::string_view san)
{
    const Move m = parse_san(pos, san);
    return {pos.apply(m), m};
}

} // namespace transcend::chess
