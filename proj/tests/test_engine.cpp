#include <transcend/engine/match.hpp>
#include <transcend/engine/mock_engine.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace transcend;
using namespace transcend::engine;
using transcend::chess::Position;

namespace {

template <class F>
Errc code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::ConfigError;
}

UciEngine mock_engine(MockEngineOptions opt = {}, std::shared_ptr<MockEngine>* out = nullptr)
{
    auto m = std::make_shared<MockEngine>(std::move(opt));
    if (out)
        *out = m;
    return UciEngine(mock_channel(m));
}

std::string tool(const char* name) { return std::string(TRANSCEND_TOOLS_DIR) + "/" + name; }

} // namespace

TEST(WinProb, Examples)
{
    EXPECT_EQ(win_prob_from_cp(0), 0.5);
    EXPECT_NEAR(win_prob_from_cp(400), 10.0 / 11.0, 1e-15);
    EXPECT_NEAR(win_prob_from_mate(1), 0.999999, 1e-15);
    EXPECT_NEAR(win_prob_from_mate(-3), 3e-6, 1e-15);
}

TEST(WinProb, MonotoneAndSymmetric)
{
    Rng rng(601);
    for (int i = 0; i < 1000; ++i) {
        const int cp = rng.between(-3000, 3000);
        EXPECT_NEAR(win_prob_from_cp(cp) + win_prob_from_cp(-cp), 1.0, 1e-12);
        EXPECT_LT(win_prob_from_cp(cp), win_prob_from_cp(cp + 1));
    }
}

TEST(Uci, ParsesInfoScores)
{
    EXPECT_EQ(parse_info_score("info depth 12 seldepth 20 score cp -35 nodes 1000 pv e2e4")->centipawns, -35);
    EXPECT_EQ(parse_info_score("info depth 3 score mate 2 pv a1a8")->mate, 2);
    EXPECT_FALSE(parse_info_score("info string hello").has_value());
    EXPECT_FALSE(parse_info_score("bestmove e2e4").has_value());
    EXPECT_FALSE(parse_info_score("info score cp").has_value());
}

TEST(Uci, HandshakePrecedesSearch)
{
    auto m = std::make_shared<MockEngine>();
    auto ch = mock_channel(m);
    FunctionChannel* raw = ch.get();
    UciEngine eng(std::move(ch));
    eng.best_move(Position::startpos());
    const auto& sent = raw->sent();
    ASSERT_GE(sent.size(), 5u);
    EXPECT_EQ(sent[0], "uci");
    EXPECT_EQ(sent[1], "setoption name Skill Level value 1");
    EXPECT_EQ(sent[2], "isready");
    EXPECT_EQ(sent.back().rfind("go movetime 100", 0), 0u);
    EXPECT_EQ(m->violations(), 0);
    EXPECT_EQ(m->skill(), 1);
}

TEST(Uci, MockFlagsGoBeforeReady)
{
    MockEngine m;
    m.handle("uci");
    m.handle("position startpos");
    const auto out = m.handle("go movetime 10");
    EXPECT_EQ(m.violations(), 1);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NE(out[0].find("protocol violation"), std::string::npos);
}

TEST(Uci, ScriptedBestMove)
{
    MockEngineOptions opt;
    opt.script[Position::startpos().key()] = "e2e4";
    UciEngine eng = mock_engine(opt);
    EXPECT_EQ(eng.best_move(Position::startpos()).uci(), "e2e4");
}

TEST(Uci, MateInOneEndsTheGame)
{
    const Position p = Position::from_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
    MockEngineOptions opt;
    opt.script[p.key()] = "a1a8";
    UciEngine scripted = mock_engine(opt);
    EXPECT_TRUE(p.apply(scripted.best_move(p)).is_checkmate());
    UciEngine searching = mock_engine();
    EXPECT_TRUE(p.apply(searching.best_move(p)).is_checkmate());
    const EvalResult e = searching.eval_winprob(p);
    EXPECT_EQ(e.mate, 1);
    EXPECT_NEAR(e.win_prob, 0.999999, 1e-15);
}

TEST(Uci, EvalAtStartIsEven)
{
    UciEngine eng = mock_engine();
    const EvalResult e = eng.eval_winprob(Position::startpos());
    EXPECT_EQ(e.centipawns, 0);
    EXPECT_EQ(e.win_prob, 0.5);
}

TEST(Uci, Faults)
{
    MockEngineOptions illegal;
    illegal.fault = MockFault::IllegalMove;
    EXPECT_EQ(code_of([&] { mock_engine(illegal).best_move(Position::startpos()); }), Errc::IllegalEngineMove);
    MockEngineOptions silent;
    silent.fault = MockFault::Silent;
    EXPECT_EQ(code_of([&] { mock_engine(silent).best_move(Position::startpos()); }), Errc::EngineTimeout);
    MockEngineOptions crash;
    crash.fault = MockFault::Crash;
    EXPECT_EQ(code_of([&] { mock_engine(crash).best_move(Position::startpos()); }), Errc::EngineCrashed);
    auto scripted = std::make_shared<MockEngine>();
    MockEngineOptions bad;
    bad.script[Position::startpos().key()] = "e2e5";
    EXPECT_EQ(code_of([&] { mock_engine(bad).best_move(Position::startpos()); }), Errc::IllegalEngineMove);
}

TEST(Uci, NoHandshakeReply)
{
    auto ch = std::make_unique<FunctionChannel>([](std::string_view) { return std::vector<std::string>{}; });
    EXPECT_EQ(code_of([&] { UciEngine eng(std::move(ch)); }), Errc::EngineTimeout);
}

TEST(Provider, Protocol)
{
    auto echo = std::make_unique<FunctionChannel>([](std::string_view line) {
        return std::vector<std::string>{line == "POS 1.e4" ? "MOVE e5" : "MOVE e4"};
    });
    EXPECT_EQ(provider_request(*echo, "1.e4"), "e5");
    EXPECT_EQ(provider_request(*echo, ""), "e4");
    EXPECT_EQ(echo->sent().back(), "POS ");

    auto resign = std::make_unique<FunctionChannel>([](std::string_view) { return std::vector<std::string>{"RESIGN"}; });
    EXPECT_EQ(code_of([&] { provider_request(*resign, "1.e4"); }), Errc::MalformedReply);
    auto mute = std::make_unique<FunctionChannel>([](std::string_view) { return std::vector<std::string>{}; });
    EXPECT_EQ(code_of([&] { provider_request(*mute, "1.e4"); }), Errc::ProviderTimeout);
    mute->close();
    EXPECT_EQ(code_of([&] { provider_request(*mute, "1.e4"); }), Errc::ProviderUnreachable);
}

TEST(Provider, PromptMovetext)
{
    EXPECT_EQ(prompt_movetext({}), "");
    EXPECT_EQ(prompt_movetext({"e4", "e5", "Nf3"}), "1.e4 e5 2.Nf3");
    EXPECT_EQ(replay_movetext("1.e4 e5 2.Nf3").fen(), "rnbqkbnr/pppp1ppp/8/4p3/4P3/5N2/PPPP1PPP/RNBQKB1R b KQkq - 1 2");
}

TEST(Provider, TabularPolicyFollowsCounts)
{
    std::vector<chess::PgnGame> games(4);
    for (std::size_t i = 0; i < games.size(); ++i)
        games[i].moves = {i < 3 ? "e4" : "d4"};
    const auto policy = TabularChessPolicy::from_games(games);
    const auto legal = Position::startpos().legal_moves();
    const Dist d = policy.distribution(Position::startpos(), legal);
    double e4 = 0.0;
    double d4 = 0.0;
    for (std::size_t i = 0; i < legal.size(); ++i) {
        if (legal[i].uci() == "e2e4")
            e4 = d[i];
        if (legal[i].uci() == "d2d4")
            d4 = d[i];
    }
    EXPECT_NEAR(e4, 0.75, 1e-12);
    EXPECT_NEAR(d4, 0.25, 1e-12);
    const Dist cold = policy.distribution(Position::startpos(), legal, Temperature(0.001));
    EXPECT_NEAR(cold.max(), 1.0, 1e-12);
    const Position unseen = Position::from_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1");
    EXPECT_EQ(policy.distribution(unseen, unseen.legal_moves()), Dist::uniform(unseen.legal_moves().size()));
}

TEST(Match, LegalBotPlaysFullGames)
{
    UciEngine eng = mock_engine();
    auto provider = random_legal_provider(11);
    MatchOptions opt;
    opt.games = 4;
    const MatchReport r = play_rated_match(*provider, eng, opt);
    ASSERT_EQ(r.games.size(), 4u);
    EXPECT_EQ(r.forfeits(), 0u);
    for (const auto& g : r.games) {
        EXPECT_EQ(g.provider_color, g.index % 2 == 0 ? chess::Color::White : chess::Color::Black);
        EXPECT_TRUE(g.score == 0.0 || g.score == 0.5 || g.score == 1.0);
        EXPECT_EQ(g.failed_samples, 0u);
        EXPECT_NO_THROW(g.game.replay());
    }
    const auto tally = r.tally({1552, 45.2, 0.06});
    EXPECT_EQ(tally.games(), 4u);
}

TEST(Match, GarbageProviderForfeitsAfterExactlyFiveSamples)
{
    UciEngine eng = mock_engine();
    auto provider = garbage_provider();
    MatchOptions opt;
    opt.games = 6;
    const MatchReport r = play_rated_match(*provider, eng, opt);
    EXPECT_EQ(r.forfeits(), 6u);
    for (const auto& g : r.games) {
        EXPECT_EQ(g.failed_samples, 5u);
        EXPECT_EQ(g.score, 0.0);
    }
    EXPECT_EQ(provider->sent().size(), 30u);
    EXPECT_EQ(r.forfeit_rate(), 1.0);
}

TEST(Match, TabularProviderFromCorpus)
{
    Rng rng(602);
    chess::CorpusOptions copt;
    copt.games = 200;
    copt.max_plies = 12;
    const auto corpus = chess::generate_noisy_corpus({0.3, 5}, copt, rng);
    auto provider = tabular_provider(TabularChessPolicy::from_games(corpus), Temperature(0.001), 3);
    UciEngine eng = mock_engine();
    MatchOptions opt;
    opt.games = 4;
    const MatchReport r = play_rated_match(*provider, eng, opt);
    EXPECT_GE(r.forfeit_rate(), 0.0);
    EXPECT_LE(r.forfeit_rate(), 1.0);
    std::set<double> allowed{0.0, 0.5, 1.0};
    for (const auto& rec : r.records({1552, 45.2, 0.06}))
        EXPECT_TRUE(allowed.count(rec.score));
}

TEST(Match, ReproducibleGivenSeed)
{
    auto run = [] {
        UciEngine eng = mock_engine();
        auto provider = random_legal_provider(99);
        MatchOptions opt;
        opt.games = 3;
        std::vector<chess::PgnGame> games;
        for (auto& g : play_rated_match(*provider, eng, opt).games)
            games.push_back(g.game);
        return chess::emit_pgn(games);
    };
    EXPECT_EQ(run(), run());
}

TEST(Match, RetryOnlyCountsFailedSamples)
{
    // Fails twice, then plays a legal move.
    int calls = 0;
    auto flaky = std::make_unique<FunctionChannel>([&calls](std::string_view line) {
        ++calls;
        if (calls % 3 != 0)
            return std::vector<std::string>{calls % 3 == 1 ? "MOVE e5" : "nonsense"};
        const Position pos = replay_movetext(line.substr(4));
        return std::vector<std::string>{"MOVE " + chess::to_san(pos, pos.legal_moves().front())};
    });
    UciEngine eng = mock_engine();
    MatchOptions opt;
    opt.games = 1;
    opt.max_plies = 6;
    const MatchReport r = play_rated_match(*flaky, eng, opt);
    EXPECT_FALSE(r.games[0].forfeit);
    EXPECT_EQ(r.games[0].failed_samples, 6u);
    EXPECT_EQ(r.games[0].termination, "ply limit");
}

TEST(Process, MockUciOverPipes)
{
    UciEngine eng(std::make_unique<ProcessChannel>(std::vector<std::string>{tool("mock_uci")}));
    const Position p = Position::from_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
    EXPECT_EQ(eng.best_move(p).uci(), "a1a8");
    EXPECT_EQ(eng.eval_winprob(Position::startpos()).win_prob, 0.5);
}

TEST(Process, Faults)
{
    EngineOptions quick;
    quick.grace_ms = 300;
    quick.movetime_ms = 10;
    EXPECT_EQ(code_of([&] {
                  UciEngine eng(std::make_unique<ProcessChannel>(std::vector<std::string>{tool("mock_uci"), "--fault", "silent"}), quick);
                  eng.best_move(Position::startpos());
              }),
              Errc::EngineTimeout);
    EXPECT_EQ(code_of([&] {
                  UciEngine eng(std::make_unique<ProcessChannel>(std::vector<std::string>{tool("mock_uci"), "--fault", "crash"}), quick);
                  eng.best_move(Position::startpos());
              }),
              Errc::EngineCrashed);
    EXPECT_EQ(code_of([] { ProcessChannel ch({"/nonexistent/engine"}); }), Errc::EngineCrashed);
}

TEST(Process, ProviderOverPipes)
{
    UciEngine eng(std::make_unique<ProcessChannel>(std::vector<std::string>{tool("mock_uci")}));
    ProcessChannel provider({tool("mock_provider"), "--mode", "random", "--seed", "5"});
    MatchOptions opt;
    opt.games = 2;
    const MatchReport r = play_rated_match(provider, eng, opt);
    EXPECT_EQ(r.forfeits(), 0u);
    ProcessChannel garbage({tool("mock_provider"), "--mode", "garbage"});
    opt.games = 1;
    EXPECT_EQ(play_rated_match(garbage, eng, opt).forfeits(), 1u);
}
