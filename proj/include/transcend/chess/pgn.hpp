#pragma once

// PGN reading and writing. Games whose movetext does not replay are reported
// with byte offsets and skipped.

#include <transcend/chess/san.hpp>

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace transcend::chess {

struct PgnGame {
    std::vector<std::pair<std::string, std::string>> tags;
    std::optional<int> white_elo;
    std::optional<int> black_elo;
    std::vector<std::string> moves;  // canonical SAN
    std::string result = "*";
    std::size_t offset = 0;

    std::optional<std::string> tag(std::string_view name) const
    {
        for (const auto& [k, v] : tags)
            if (k == name)
                return v;
        return std::nullopt;
    }

    Position start() const
    {
        if (auto fen = tag("FEN"))
            return Position::from_fen(*fen);
        return Position::startpos();
    }

    /// Positions before each move, followed by the final position.
    std::vector<Position> replay() const
    {
        std::vector<Position> out{start()};
        for (const std::string& san : moves)
            out.push_back(apply_san(out.back(), san).first);
        return out;
    }

    /// Movetext with move numbers and no result, e.g. "1. e4 e5 2. Nf3".
    std::string movetext() const
    {
        const Position s = start();
        int number = s.fullmove_number();
        bool white = s.side_to_move() == Color::White;
        std::string out;
        for (std::size_t i = 0; i < moves.size(); ++i) {
            if (!out.empty())
                out += ' ';
            if (white) {
                out += std::to_string(number) + ". ";
            } else if (i == 0) {
                out += std::to_string(number) + "... ";
            }
            out += moves[i];
            if (!white)
                ++number;
            white = !white;
        }
        return out;
    }
};

struct PgnError {
    std::size_t game_index = 0;  // index among all games encountered, kept or not
    std::size_t offset = 0;      // byte offset of the offending token
    Errc code = Errc::ParseError;
    std::string message;
};

struct PgnParseResult {
    std::vector<PgnGame> games;
    std::vector<PgnError> errors;
};

inline bool is_result_token(std::string_view t) { return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*"; }

namespace detail {

inline std::optional<int> parse_elo(std::string_view v)
{
    int x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || r.ec != std::errc{} || r.ptr != v.data() + v.size() || x <= 0)
        return std::nullopt;
    return x;
}

class PgnReader {
public:
    explicit PgnReader(std::string_view text) : s_(text) {}

    PgnParseResult run()
    {
        while (true) {
            skip_space();
            if (i_ >= s_.size())
                break;
            read_game();
        }
        return std::move(out_);
    }

private:
    bool at_line_start(std::size_t pos) const { return pos == 0 || s_[pos - 1] == '\n' || s_[pos - 1] == '\r'; }

    void skip_space()
    {
        while (i_ < s_.size()) {
            const char c = s_[i_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                ++i_;
            else if (c == '%' && at_line_start(i_))
                skip_line();
            else
                break;
        }
    }

    void skip_line()
    {
        while (i_ < s_.size() && s_[i_] != '\n')
            ++i_;
    }

    void fail(std::size_t offset, Errc code, std::string msg)
    {
        if (!failed_)
            out_.errors.push_back({game_index_, offset, code, std::move(msg)});
        failed_ = true;
    }

    bool read_tag(PgnGame& g)
    {
        const std::size_t start = i_;
        ++i_;  // '['
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t'))
            ++i_;
        const std::size_t name_start = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
            ++i_;
        std::string name(s_.substr(name_start, i_ - name_start));
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t'))
            ++i_;
        if (name.empty() || i_ >= s_.size() || s_[i_] != '"') {
            fail(start, Errc::ParseError, "malformed tag pair");
            skip_line();
            return false;
        }
        ++i_;
        std::string value;
        while (i_ < s_.size() && s_[i_] != '"' && s_[i_] != '\n') {
            if (s_[i_] == '\\' && i_ + 1 < s_.size())
                ++i_;
            value += s_[i_++];
        }
        if (i_ >= s_.size() || s_[i_] != '"') {
            fail(start, Errc::ParseError, "unterminated tag value");
            skip_line();
            return false;
        }
        ++i_;
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t'))
            ++i_;
        if (i_ >= s_.size() || s_[i_] != ']') {
            fail(start, Errc::ParseError, "tag pair missing ']'");
            skip_line();
            return false;
        }
        ++i_;
        g.tags.emplace_back(std::move(name), std::move(value));
        return true;
    }

    void skip_comment()
    {
        const std::size_t start = i_;
        const std::size_t end = s_.find('}', i_);
        if (end == std::string_view::npos) {
            fail(start, Errc::ParseError, "unterminated comment");
            i_ = s_.size();
        } else {
            i_ = end + 1;
        }
    }

    void skip_variation()
    {
        const std::size_t start = i_;
        int depth = 0;
        while (i_ < s_.size()) {
            const char c = s_[i_];
            if (c == '{') {
                skip_comment();
                continue;
            }
            if (c == ';') {
                skip_line();
                continue;
            }
            ++i_;
            if (c == '(')
                ++depth;
            else if (c == ')' && --depth == 0)
                return;
        }
        fail(start, Errc::ParseError, "unterminated variation");
    }

    static std::string_view strip_move_number(std::string_view t)
    {
        std::size_t k = 0;
        while (k < t.size() && std::isdigit(static_cast<unsigned char>(t[k])))
            ++k;
        if (k == 0 || k >= t.size() || t[k] != '.')
            return t;
        while (k < t.size() && t[k] == '.')
            ++k;
        return t.substr(k);
    }

    static std::string_view strip_annotations(std::string_view t)
    {
        while (!t.empty() && (t.back() == '!' || t.back() == '?' || t.back() == '.'))
            t.remove_suffix(1);
        return t;
    }

    void read_game()
    {
        PgnGame g;
        g.offset = i_;
        failed_ = false;
        while (i_ < s_.size() && s_[i_] == '[') {
            read_tag(g);
            skip_space();
        }
        std::optional<Position> pos;
        try {
            pos = g.start();
        } catch (const Error& e) {
            fail(g.offset, e.code(), std::string("bad FEN tag: ") + e.what());
        }
        std::optional<std::string> result_token;
        while (true) {
            skip_space();
            if (i_ >= s_.size())
                break;
            const char c = s_[i_];
            if (c == '[' && at_line_start(i_))
                break;  // next game without a result token
            if (c == '{') {
                skip_comment();
                continue;
            }
            if (c == ';') {
                skip_line();
                continue;
            }
            if (c == '(') {
                skip_variation();
                continue;
            }
            if (c == ')') {
                fail(i_, Errc::ParseError, "unbalanced ')'");
                ++i_;
                continue;
            }
            if (c == '$') {
                ++i_;
                while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
                    ++i_;
                continue;
            }
            const std::size_t start = i_;
            while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '{'
                   && s_[i_] != '(' && s_[i_] != ')' && s_[i_] != ';' && s_[i_] != '$')
                ++i_;
            const std::string_view raw = s_.substr(start, i_ - start);
            if (is_result_token(raw)) {
                result_token = std::string(raw);
                break;
            }
            const std::string_view san = strip_annotations(strip_move_number(raw));
            if (san.empty() || failed_ || !pos)
                continue;
            try {
                const Move m = parse_san(*pos, san);
                g.moves.push_back(to_san(*pos, m));
                pos = pos->apply(m);
            } catch (const Error& e) {
                fail(start, e.code(), e.what());
            }
        }
        const auto tag_result = g.tag("Result");
        if (result_token && tag_result && *tag_result != *result_token)
            fail(g.offset, Errc::ParseError, "result token " + *result_token + " contradicts tag " + *tag_result);
        if (result_token)
            g.result = *result_token;
        else if (tag_result && is_result_token(*tag_result))
            g.result = *tag_result;
        if (auto w = g.tag("WhiteElo"))
            g.white_elo = parse_elo(*w);
        if (auto b = g.tag("BlackElo"))
            g.black_elo = parse_elo(*b);
        if (!failed_)
            out_.games.push_back(std::move(g));
        ++game_index_;
    }

    std::string_view s_;
    std::size_t i_ = 0;
    std::size_t game_index_ = 0;
    bool failed_ = false;
    PgnParseResult out_;
};

} // namespace detail

inline PgnParseResult parse_pgn(std::string_view text) { return detail::PgnReader(text).run(); }

/// Export form: tags, a blank line, movetext wrapped at 80 columns, result.
inline std::string emit_pgn(const PgnGame& g)
{
    std::string out;
    for (const auto& [k, v] : g.tags) {
        out += '[' + k + " \"";
        for (char c : v) {
            if (c == '"' || c == '\\')
                out += '\\';
            out += c;
        }
        out += "\"]\n";
    }
    if (!g.tags.empty())
        out += '\n';
    std::string line;
    auto push = [&](const std::string& word) {
        if (!line.empty() && line.size() + 1 + word.size() > 80) {
            out += line + '\n';
            line.clear();
        }
        if (!line.empty())
            line += ' ';
        line += word;
    };
    const std::string text = g.movetext();
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t j = text.find(' ', i);
        if (j == std::string::npos)
            j = text.size();
        std::string word = text.substr(i, j - i);
        // Keep a move number attached to its move.
        if (!word.empty() && std::isdigit(static_cast<unsigned char>(word[0])) && j < text.size()) {
            const std::size_t k = text.find(' ', j + 1);
            const std::size_t e = k == std::string::npos ? text.size() : k;
            word += ' ' + text.substr(j + 1, e - j - 1);
            j = e;
        }
        push(word);
        i = j + 1;
    }
    push(g.result);
    out += line + "\n\n";
    return out;
}

inline std::string emit_pgn(const std::vector<PgnGame>& games)
{
    std::string out;
    for (const PgnGame& g : games)
        out += emit_pgn(g);
    return out;
}

} // namespace transcend::chess
