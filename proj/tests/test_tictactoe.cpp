#include <transcend/tictactoe.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <set>
#include <vector>

using namespace transcend;
using namespace transcend::ttt;

TEST(Board, ParseAndKeyRoundTrip)
{
    const Board b = Board::parse("XO.X.O...");
    EXPECT_EQ(b.str(), "XO.X.O...");
    EXPECT_EQ(Board::from_key(b.key()), b);
    EXPECT_EQ(b.side_to_move(), Side::X);
    EXPECT_THROW(Board::parse("XX......."), Error);
    EXPECT_THROW(Board::parse("XXXOOO..."), Error);
    EXPECT_THROW(Board::parse("XXX.OO.O."), Error);  // X has a line but O moved after it
    EXPECT_THROW(Board::parse("X"), Error);
}

TEST(LegalMoves, Examples)
{
    EXPECT_EQ(legal_moves(Board{}).size(), 9u);
    EXPECT_EQ(legal_moves(Board::parse("XOXXOOOX.")), std::vector<int>{8});
    try {
        legal_moves(Board::parse("XXXOO...."));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TerminalState);
    }
}

TEST(Solver, ReachableCountsMatchIndependentEnumeration)
{
    const Solver& s = game().solver();
    EXPECT_EQ(s.reachable_keys().size(), 5478u);
    EXPECT_EQ(game().num_states(), 4520u);

    std::set<std::uint32_t> seen{Board{}.key()};
    std::deque<Board> queue{Board{}};
    while (!queue.empty()) {
        const Board b = queue.front();
        queue.pop_front();
        if (b.terminal())
            continue;
        for (int m : legal_moves(b)) {
            const Board n = b.play(m);
            if (seen.insert(n.key()).second)
                queue.push_back(n);
        }
    }
    EXPECT_EQ(seen.size(), 5478u);
    for (std::uint32_t k : seen)
        EXPECT_TRUE(s.reachable(Board::from_key(k)));
    std::size_t valid = 0;
    for (std::uint32_t k = 0; k < kKeySpace; ++k)
        valid += Board::from_key(k).valid();
    EXPECT_EQ(valid, 5478u);
}

TEST(Solver, Examples)
{
    const Solver& s = game().solver();
    EXPECT_EQ(s.value(Board{}), 0);
    EXPECT_EQ(s.value(Board::parse("XX.OO....")), 1);
    EXPECT_EQ(s.value(Board::parse("XXXOO....")), -1);
}

TEST(Solver, NegamaxConsistency)
{
    const Solver& s = game().solver();
    for (std::uint32_t k : s.reachable_keys()) {
        const Board b = Board::from_key(k);
        if (b.terminal()) {
            EXPECT_EQ(s.value(b), b.winner() ? -1 : 0);
            continue;
        }
        int best = -1;
        for (int m : legal_moves(b)) {
            const Board n = b.play(m);
            // A child's value is the opponent's; the mover's is its negation.
            best = std::max(best, -s.value(n));
            const double r = s.reward_of_move(b, m);
            EXPECT_EQ(r, (1.0 - s.value(n)) / 2.0);
        }
        EXPECT_EQ(s.value(b), best);
    }
}

TEST(RewardOfMove, Examples)
{
    const Solver& s = game().solver();
    EXPECT_EQ(s.reward_of_move(Board::parse("XX.OO...."), 2), 1.0);
    // O must block at 2; anything else lets X complete the top row.
    EXPECT_EQ(s.reward_of_move(Board::parse("XX..O...."), 8), 0.0);
    EXPECT_EQ(s.reward_of_move(Board::parse("XX..O...."), 2), 0.5);
    for (int m = 0; m < 9; ++m)
        EXPECT_EQ(s.reward_of_move(Board{}, m), 0.5);
    try {
        s.reward_of_move(Board::parse("XX..O...."), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IllegalMove);
    }
}

TEST(Rollout, PerfectPlayDraws)
{
    const Policy perfect = perfect_player();
    Rng rng(301);
    for (int i = 0; i < 200; ++i)
        EXPECT_EQ(rollout(perfect, perfect, rng).outcome, 'D');
}

TEST(Rollout, DeterministicUnderSeed)
{
    const Policy u = uniform_player();
    Rng a(302);
    Rng b(302);
    for (int i = 0; i < 50; ++i)
        EXPECT_EQ(rollout(u, u, a).dump(), rollout(u, u, b).dump());
}

TEST(Rollout, EveryStepIsLegal)
{
    const auto cohort = build_expert_cohort(std::vector<double>{0.4});
    Rng rng(303);
    for (int i = 0; i < 500; ++i) {
        const Trajectory t = rollout(cohort[0], uniform_player(), rng);
        Board b;
        for (const auto& [state, move] : t.steps) {
            ASSERT_EQ(state, b);
            const auto legal = legal_moves(b);
            ASSERT_NE(std::find(legal.begin(), legal.end(), move), legal.end());
            b = b.play(move);
        }
        EXPECT_TRUE(b.terminal());
        EXPECT_EQ(t.outcome, outcome_of(b));
    }
}

TEST(Rollout, FallbackWhenPolicyPutsNoMassOnLegalCells)
{
    // A policy that always wants cell 0 still completes legal games.
    const std::vector<Dist> rows(game().num_states(), Dist::one_hot(9, 0));
    const Policy stubborn("stubborn", rows);
    Rng rng(304);
    for (int i = 0; i < 100; ++i)
        EXPECT_NE(rollout(stubborn, stubborn, rng).outcome, '?');
    const auto w = move_weights(game(), stubborn, Board::parse("X........"));
    EXPECT_EQ(w[0], 0.0);
    EXPECT_NEAR(w[1], 1.0 / 8.0, 1e-15);
}

TEST(Rollout, DumpFormat)
{
    Trajectory t;
    Board b;
    for (int m : {4, 0, 8, 2, 6}) {
        t.steps.emplace_back(b, m);
        b = b.play(m);
    }
    t.outcome = outcome_of(b);
    EXPECT_EQ(t.dump(), "4 0 8 2 6 D");
    t.outcome = 'X';
    EXPECT_EQ(t.dump(), "4 0 8 2 6 X");
}

TEST(ExactPlay, UniformMatchesRationalOracle)
{
    const ExactPlay r = exact_play(uniform_player(), uniform_player());
    // Exact rationals from an independent enumeration: 737/1260, 121/420, 8/63.
    EXPECT_NEAR(r.x_win, 737.0 / 1260.0, 1e-14);
    EXPECT_NEAR(r.o_win, 121.0 / 420.0, 1e-14);
    EXPECT_NEAR(r.draw, 8.0 / 63.0, 1e-14);
}

TEST(Rollout, UniformXWinRate)
{
    Rng rng(305);
    const Policy u = uniform_player();
    int x = 0;
    for (int i = 0; i < 10000; ++i)
        x += rollout(u, u, rng).outcome == 'X';
    const double rate = x / 10000.0;
    EXPECT_GE(rate, 0.56);
    EXPECT_LE(rate, 0.62);
}

TEST(Visitation, SingleGameBound)
{
    Rng rng(306);
    const auto states = visitation_sample(uniform_player(), uniform_player(), 1, rng);
    EXPECT_GE(states.size(), 3u);
    EXPECT_LE(states.size(), 5u);
}

TEST(Visitation, DeterministicPairGivesSameMultiset)
{
    const Policy perfect = optimal_expert(game().table());
    // First optimal cell only, so the pair has no randomness left.
    std::vector<Dist> rows;
    for (const Dist& d : perfect.rows()) {
        std::size_t first = 0;
        while (d[first] == 0.0)
            ++first;
        rows.push_back(Dist::one_hot(9, first));
    }
    const Policy det("det", rows);
    Rng a(1);
    Rng b(2);
    EXPECT_EQ(visitation_sample(det, det, 5, a), visitation_sample(det, det, 5, b));
}

TEST(Visitation, ConvergesToExactForwardDp)
{
    // A low-noise pair keeps the visited support small enough for the sample size.
    const auto cohort = build_expert_cohort(std::vector<double>{0.1});
    const Policy opponent = perfect_player();
    for (Seat seat : {Seat::X, Seat::O, Seat::Alternate}) {
        Rng rng(307);
        const auto sample = visitation_sample(cohort[0], opponent, 50000, rng, seat);
        std::vector<double> freq(game().num_states(), 0.0);
        for (std::size_t id : sample)
            freq[id] += 1.0;
        const auto exact = exact_visitation(cohort[0], opponent, seat);
        double l1 = 0.0;
        for (std::size_t id = 0; id < freq.size(); ++id)
            l1 += std::abs(freq[id] / static_cast<double>(sample.size()) - exact[id]);
        EXPECT_LE(l1, 0.05) << "seat " << static_cast<int>(seat);
    }
}

TEST(Cohort, NearZeroNoiseNeverLoses)
{
    const auto cohort = build_expert_cohort(std::vector<double>{1e-9});
    const Policy perfect = perfect_player();
    Rng rng(308);
    int losses = 0;
    for (int i = 0; i < 1000; ++i) {
        const bool as_x = i % 2 == 0;
        const auto t = as_x ? rollout(cohort[0], perfect, rng) : rollout(perfect, cohort[0], rng);
        losses += score_for(t.outcome, as_x ? Side::X : Side::O) == 0.0;
    }
    EXPECT_EQ(losses, 0);
}

TEST(Cohort, HighNoiseApproachesUniform)
{
    const auto cohort = build_expert_cohort(std::vector<double>{1.0 - 1e-9});
    EXPECT_LE(sup_distance(cohort[0], uniform_player()), 1e-8);
    EXPECT_THROW(build_expert_cohort(std::vector<double>{1.0}), Error);
    EXPECT_THROW(build_expert_cohort(std::vector<double>{0.0}), Error);
}

TEST(Cohort, TemperedMixtureBeatsEveryExpertExactly)
{
    const auto cohort = build_expert_cohort(std::vector<double>{0.5, 0.7});
    const Policy mixture = mixture_policy(cohort);
    const Policy cold = temper(mixture, Temperature(0.001), TemperScheme::PowerOnProbs, game().table());
    const Policy reference = uniform_player();
    const double mixture_score = expected_score(cold, reference);
    for (const Policy& e : cohort)
        EXPECT_GT(mixture_score, expected_score(e, reference) + 1e-9) << e.label();
    // At unit temperature the mixture is no better than the best expert.
    const double warm = expected_score(mixture, reference);
    EXPECT_LE(warm, std::max(expected_score(cohort[0], reference), expected_score(cohort[1], reference)));
}
