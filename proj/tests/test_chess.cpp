#include <transcend/chess/dataset.hpp>
#include <transcend/chess/pgn.hpp>
#include <transcend/chess/tokenizer.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace transcend;
using namespace transcend::chess;

namespace {

std::string read_data(const std::string& name)
{
    std::ifstream in(std::string(TRANSCEND_TEST_DATA_DIR) + "/" + name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr std::string_view kKiwipete = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1";
constexpr std::string_view kPosition3 = "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1";

template <class F>
Errc code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::ConfigError;  // sentinel: nothing thrown
}

} // namespace

// Perft totals confirmed with python-chess before being frozen here.
TEST(Perft, StartPosition)
{
    const Position p = Position::startpos();
    EXPECT_EQ(p.legal_moves().size(), 20u);
    EXPECT_EQ(perft(p, 1), 20u);
    EXPECT_EQ(perft(p, 2), 400u);
    EXPECT_EQ(perft(p, 3), 8902u);
    EXPECT_EQ(perft(p, 4), 197281u);
}

TEST(Perft, Kiwipete)
{
    const Position p = Position::from_fen(kKiwipete);
    EXPECT_EQ(perft(p, 1), 48u);
    EXPECT_EQ(perft(p, 2), 2039u);
    EXPECT_EQ(perft(p, 3), 97862u);
}

TEST(Perft, EndgamePosition)
{
    const Position p = Position::from_fen(kPosition3);
    EXPECT_EQ(perft(p, 1), 14u);
    EXPECT_EQ(perft(p, 2), 191u);
    EXPECT_EQ(perft(p, 3), 2812u);
    EXPECT_EQ(perft(p, 4), 43238u);
}

TEST(Fen, StartposRoundTrip)
{
    const Position p = Position::startpos();
    EXPECT_EQ(p.fen(), kStartFen);
    EXPECT_EQ(p.side_to_move(), Color::White);
    EXPECT_EQ(p.castling(), 15);
    EXPECT_TRUE(p.at(make_square(4, 0)).is(Color::White, PieceType::King));
    EXPECT_EQ(Position::from_fen(kKiwipete).fen(), kKiwipete);
}

TEST(Fen, Canonicalizes)
{
    EXPECT_EQ(Position::from_fen("4k3/8/8/8/8/8/8/R3K2R w QK - 0 1").fen(), "4k3/8/8/8/8/8/8/R3K2R w KQ - 0 1");
}

TEST(Fen, ErrorsNameTheField)
{
    auto field_of = [](std::string_view fen) -> std::string {
        try {
            Position::from_fen(fen);
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::MalformedFen);
            return std::string(e.what()).substr(std::string(e.what()).find("field"), 7);
        }
        return "none";
    };
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0"), "field 5");
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKKNR w KQkq - 0 1"), "field 0");  // two kings
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/9/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"), "field 0");
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR x KQkq - 0 1"), "field 1");
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkz - 0 1"), "field 2");
    EXPECT_EQ(field_of("4k3/8/8/8/8/8/8/4K3 w K - 0 1"), "field 2");
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq e3 0 1"), "field 3");
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - -1 1"), "field 4");
    EXPECT_EQ(field_of("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 0"), "field 5");
    EXPECT_EQ(field_of("4k3/8/8/8/8/8/4Q3/4K3 w - - 0 1"), "field 1");  // black in check, white to move
}

TEST(Fen, KeyDropsClocksAndUncapturableEnPassant)
{
    const Position a = Position::startpos().apply(*Position::startpos().find_uci("e2e4"));
    EXPECT_EQ(a.fen(), "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
    EXPECT_EQ(a.key(), "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq -");
    const Position b = Position::from_fen("rnbqkbnr/pp1p1ppp/5n2/2pPp3/8/8/PPP1PPPP/RNBQKBNR w KQkq e6 0 4");
    EXPECT_EQ(b.key(), "rnbqkbnr/pp1p1ppp/5n2/2pPp3/8/8/PPP1PPPP/RNBQKBNR w KQkq e6");
}

TEST(San, Examples)
{
    const Position p = Position::startpos();
    const auto [next, m] = apply_san(p, "e4");
    EXPECT_EQ(m.uci(), "e2e4");
    EXPECT_TRUE(next.at(make_square(4, 3)).is(Color::White, PieceType::Pawn));
    EXPECT_EQ(code_of([&] { apply_san(p, "e5"); }), Errc::IllegalSan);
    EXPECT_EQ(code_of([&] { apply_san(p, "Zz9"); }), Errc::MalformedSan);
    EXPECT_EQ(code_of([&] { apply_san(p, ""); }), Errc::MalformedSan);
    EXPECT_EQ(code_of([&] { apply_san(p, "e4+"); }), Errc::IllegalSan);
}

TEST(San, Ambiguity)
{
    // Knights on b1 and f3 can both reach d2.
    const Position p = Position::from_fen("4k3/8/8/8/8/5N2/8/1N2K3 w - - 0 1");
    EXPECT_EQ(code_of([&] { apply_san(p, "Nd2"); }), Errc::AmbiguousSan);
    EXPECT_EQ(parse_san(p, "Nbd2").uci(), "b1d2");
    EXPECT_EQ(parse_san(p, "Nfd2").uci(), "f3d2");
    EXPECT_EQ(to_san(p, *p.find_uci("b1d2")), "Nbd2");
    // Rooks on the same file need rank disambiguation.
    const Position r = Position::from_fen("4k3/R7/8/8/8/8/R7/4K3 w - - 0 1");
    EXPECT_EQ(to_san(r, *r.find_uci("a2a4")), "R2a4");
    EXPECT_EQ(code_of([&] { apply_san(r, "Ra4"); }), Errc::AmbiguousSan);
}

TEST(San, SpecialMoves)
{
    const Position k = Position::from_fen(kKiwipete);
    EXPECT_EQ(to_san(k, parse_san(k, "O-O")), "O-O");
    EXPECT_EQ(parse_san(k, "O-O-O").uci(), "e1c1");
    const Position ep = Position::from_fen("rnbqkbnr/pp1p1ppp/5n2/2pPp3/8/8/PPP1PPPP/RNBQKBNR w KQkq e6 0 4");
    EXPECT_EQ(parse_san(ep, "dxe6").uci(), "d5e6");
    EXPECT_TRUE(parse_san(ep, "dxe6").is_en_passant());
    const Position promo = Position::from_fen("4k3/1P6/8/8/8/8/6p1/4K3 w - - 0 1");
    EXPECT_EQ(parse_san(promo, "b8=Q+").uci(), "b7b8q");
    EXPECT_EQ(code_of([&] { parse_san(promo, "b8"); }), Errc::IllegalSan);
    EXPECT_EQ(to_san(promo, *promo.find_uci("b7b8n")), "b8=N");
}

TEST(San, MateSuffix)
{
    const Position p = Position::from_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
    EXPECT_EQ(to_san(p, parse_san(p, "Ra8#")), "Ra8#");
    EXPECT_EQ(code_of([&] { parse_san(p, "Ra8+"); }), Errc::IllegalSan);
    EXPECT_NO_THROW(parse_san(p, "Ra8"));
    EXPECT_TRUE(apply_san(p, "Ra8").first.is_checkmate());
}

TEST(Pgn, TrailingEllipsisAfterMove)
{
    const auto r = parse_pgn("[Result \"1/2-1/2\"]\n\n1.e4 e5 2.Nf3 Nc6 3.Bb5... 1/2-1/2\n");
    ASSERT_EQ(r.games.size(), 1u);
    EXPECT_TRUE(r.errors.empty());
    EXPECT_EQ(r.games[0].moves, (std::vector<std::string>{"e4", "e5", "Nf3", "Nc6", "Bb5"}));
    EXPECT_EQ(r.games[0].result, "1/2-1/2");
    EXPECT_EQ(r.games[0].movetext(), "1. e4 e5 2. Nf3 Nc6 3. Bb5");
}

TEST(Pgn, EmptyInput)
{
    EXPECT_TRUE(parse_pgn("").games.empty());
    EXPECT_TRUE(parse_pgn("  \n\n").errors.empty());
}

TEST(Pgn, CorruptGameIsReportedAndSkipped)
{
    const std::string text = "[Event \"a\"]\n\n1. e4 e5 2. Nf3 1-0\n\n"
                             "[Event \"b\"]\n\n1. e4 e5 2. Ke3 Nc6 0-1\n\n"
                             "[Event \"c\"]\n\n1. d4 d5 *\n";
    const auto r = parse_pgn(text);
    ASSERT_EQ(r.games.size(), 2u);
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_EQ(r.errors[0].game_index, 1u);
    EXPECT_EQ(r.errors[0].code, Errc::IllegalSan);
    EXPECT_EQ(text.substr(r.errors[0].offset, 3), "Ke3");
    EXPECT_EQ(r.games[1].tag("Event"), "c");
}

TEST(Pgn, ResultMismatchAndOtherErrors)
{
    EXPECT_EQ(parse_pgn("[Result \"1-0\"]\n\n1. e4 0-1\n").errors.size(), 1u);
    EXPECT_EQ(parse_pgn("1. e4 {never closed\n").errors.size(), 1u);
    EXPECT_EQ(parse_pgn("1. e4 (1. d4 1-0\n").errors.size(), 1u);
    EXPECT_EQ(parse_pgn("[Event \"x]\n\n1. e4 *\n").errors.size(), 1u);
}

TEST(Pgn, StripsDecorations)
{
    const auto r = parse_pgn("1.e4!? {best by test} (1.d4 d5 (1...Nf6)) 1...e5 $1 2.Nf3?! ; rest of line\nNc6 *");
    ASSERT_EQ(r.games.size(), 1u);
    EXPECT_EQ(r.games[0].moves, (std::vector<std::string>{"e4", "e5", "Nf3", "Nc6"}));
}

TEST(Pgn, EloTags)
{
    const auto r = parse_pgn("[WhiteElo \"1500\"]\n[BlackElo \"?\"]\n\n*\n");
    ASSERT_EQ(r.games.size(), 1u);
    EXPECT_EQ(r.games[0].white_elo, 1500);
    EXPECT_FALSE(r.games[0].black_elo.has_value());
}

TEST(Pgn, FixtureMatchesReferenceAndIsAFixedPoint)
{
    const std::string text = read_data("fixture_1000.pgn");
    const std::string expected = read_data("fixture_1000.expected");
    const auto r = parse_pgn(text);
    ASSERT_TRUE(r.errors.empty()) << r.errors.front().message;
    ASSERT_EQ(r.games.size(), 1000u);
    std::istringstream lines(expected);
    std::string line;
    std::size_t i = 0;
    while (std::getline(lines, line)) {
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 + 1);
        const PgnGame& g = r.games[i];
        std::string sans;
        for (const auto& s : g.moves)
            sans += (sans.empty() ? "" : " ") + s;
        EXPECT_EQ(sans, line.substr(t2 + 1)) << "game " << i;
        EXPECT_EQ(g.result, line.substr(t1 + 1, t2 - t1 - 1)) << "game " << i;
        EXPECT_EQ(g.replay().back().fen(), line.substr(0, t1)) << "game " << i;
        ++i;
    }
    EXPECT_EQ(i, 1000u);

    const std::string emitted = emit_pgn(r.games);
    const auto again = parse_pgn(emitted);
    ASSERT_TRUE(again.errors.empty());
    ASSERT_EQ(again.games.size(), r.games.size());
    for (std::size_t k = 0; k < r.games.size(); ++k) {
        EXPECT_EQ(again.games[k].moves, r.games[k].moves);
        EXPECT_EQ(again.games[k].tags, r.games[k].tags);
        EXPECT_EQ(again.games[k].result, r.games[k].result);
    }
    EXPECT_EQ(emit_pgn(again.games), emitted);
}

TEST(ChessProperties, SanRoundTripAndFenSelfInverse)
{
    const auto r = parse_pgn(read_data("fixture_1000.pgn"));
    Rng rng(501);
    std::size_t checked = 0;
    for (const PgnGame& g : r.games) {
        Position pos = g.start();
        for (const std::string& san : g.moves) {
            const Move m = parse_san(pos, san);
            EXPECT_EQ(to_san(pos, m), san);
            if (rng.below(20) == 0 && checked < 1000) {
                EXPECT_EQ(Position::from_fen(pos.fen()), pos);
                EXPECT_EQ(Position::from_fen(pos.fen()).fen(), pos.fen());
                ++checked;
            }
            pos = pos.apply(m);
        }
    }
    EXPECT_GE(checked, 1000u);
}

TEST(Tokenizer, Examples)
{
    const auto ids = tokenize32("1.e4 e5 1-0");
    EXPECT_EQ(ids.size(), 11u);
    EXPECT_EQ(detokenize(ids), "1.e4 e5 1-0");
    EXPECT_TRUE(tokenize32("").empty());
    EXPECT_EQ(code_of([] { tokenize32("1.e4 $1"); }), Errc::UnknownSymbol);
    const std::vector<std::uint8_t> bad{32};
    EXPECT_EQ(code_of([&] { detokenize(bad); }), Errc::UnknownSymbol);
}

TEST(Tokenizer, ExhaustiveBijection)
{
    for (std::uint8_t id = 0; id < 32; ++id) {
        const std::vector<std::uint8_t> one{id};
        const std::string s = detokenize(one);
        ASSERT_EQ(s.size(), 1u);
        EXPECT_EQ(tokenize32(s), one);
    }
    int accepted = 0;
    for (int c = 0; c < 256; ++c) {
        const std::string s(1, static_cast<char>(c));
        try {
            tokenize32(s);
            ++accepted;
        } catch (const Error&) {
        }
    }
    EXPECT_EQ(accepted, 32);
}

TEST(Tokenizer, VocabularyTable)
{
    const std::string t = vocabulary_table();
    EXPECT_EQ(t.substr(0, 3), "0\t ");
    EXPECT_NE(t.find("\n31\t.\n"), std::string::npos);
    EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 32);
}

TEST(Tokenizer, RandomMovetextRoundTrips)
{
    Rng rng(502);
    for (int i = 0; i < 10000; ++i) {
        std::string s;
        const std::size_t n = rng.below(80);
        for (std::size_t k = 0; k < n; ++k)
            s += kVocabulary[rng.below(32)];
        EXPECT_EQ(detokenize(tokenize32(s)), s);
    }
}

TEST(Dataset, FilterByRating)
{
    std::vector<PgnGame> games(3);
    games[0].white_elo = 900;
    games[0].black_elo = 950;
    games[1].white_elo = 990;
    games[1].black_elo = 1010;
    games[2].white_elo = 1200;
    const auto f = filter_by_rating(games, 1000);
    ASSERT_EQ(f.kept.size(), 1u);
    EXPECT_EQ(f.kept[0].white_elo, 900);
    EXPECT_EQ(f.dropped_unrated, 1u);
    EXPECT_EQ(f.dropped_above, 1u);
    EXPECT_EQ(filter_by_rating(games, kNoCutoff).kept.size(), 2u);
    EXPECT_THROW(filter_by_rating(games, 0), Error);
}

TEST(Dataset, FilterMatchesFixtureAndIsMonotone)
{
    Rng rng(503);
    std::vector<PgnGame> games(100);
    std::vector<std::size_t> expect_at_1500;
    for (std::size_t i = 0; i < games.size(); ++i) {
        games[i].white_elo = 800 + static_cast<int>(rng.below(1400));
        games[i].black_elo = 800 + static_cast<int>(rng.below(1400));
        if (std::max(*games[i].white_elo, *games[i].black_elo) <= 1500)
            expect_at_1500.push_back(i);
        games[i].offset = i;
    }
    const auto kept = filter_by_rating(games, 1500).kept;
    ASSERT_EQ(kept.size(), expect_at_1500.size());
    for (std::size_t k = 0; k < kept.size(); ++k)
        EXPECT_EQ(kept[k].offset, expect_at_1500[k]);
    std::size_t prev = 0;
    for (long long cutoff = 800; cutoff <= 2300; cutoff += 50) {
        const auto n = filter_by_rating(games, cutoff).kept.size();
        EXPECT_GE(n, prev);
        prev = n;
    }
}

TEST(Dataset, EntropyExamples)
{
    std::vector<PgnGame> same(5);
    for (auto& g : same)
        g.moves = {"e4"};
    const auto r = common_state_entropy(same, 5);
    ASSERT_EQ(r.n_states(), 1u);
    EXPECT_EQ(r.mean_entropy, 0.0);
    EXPECT_EQ(r.states[0].legal_count, 20u);

    std::vector<PgnGame> spread;
    for (const Move& m : Position::startpos().legal_moves()) {
        PgnGame g;
        g.moves = {to_san(Position::startpos(), m)};
        spread.push_back(g);
    }
    EXPECT_NEAR(common_state_entropy(spread, 20).mean_entropy, 1.0, 1e-12);

    std::vector<PgnGame> single(1);
    single[0].moves = {"e4", "e5"};
    EXPECT_EQ(code_of([&] { common_state_entropy(single, 2); }), Errc::NoQualifyingStates);
    EXPECT_EQ(code_of([&] { common_state_entropy(single, 1); }), Errc::ConfigError);
}

TEST(Dataset, NoisierCorporaAreMoreDiverse)
{
    Rng rng(504);
    CorpusOptions opt;
    opt.games = 400;
    opt.max_plies = 10;
    double prev = 2.0;
    for (double rho : {0.8, 0.5, 0.2}) {
        const auto corpus = generate_noisy_corpus({rho, 7}, opt, rng);
        const double h = common_state_entropy(corpus, 30).mean_entropy;
        EXPECT_LT(h, prev) << "rho " << rho;
        prev = h;
    }
}

TEST(Dataset, SyntheticCorpusReplaysThroughPgn)
{
    Rng rng(505);
    CorpusOptions opt;
    opt.games = 20;
    opt.max_plies = 40;
    const auto corpus = generate_noisy_corpus({0.5, 3}, opt, rng);
    const auto back = parse_pgn(emit_pgn(corpus));
    ASSERT_TRUE(back.errors.empty());
    ASSERT_EQ(back.games.size(), corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i)
        EXPECT_EQ(back.games[i].moves, corpus[i].moves);
}
