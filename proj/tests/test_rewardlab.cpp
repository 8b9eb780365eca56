#include <transcend/rewardlab.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace transcend;

namespace {

Dist d(std::vector<double> p) { return Dist::from_probs(std::move(p)); }

Instance uniform_instance(RewardTable t)
{
    const std::size_t n = t.num_inputs();
    return Instance(std::move(t), Dist::uniform(n), Dist::uniform(n));
}

std::vector<Policy> constant_experts(std::size_t inputs, std::initializer_list<std::vector<double>> rows)
{
    std::vector<Policy> out;
    for (const auto& r : rows)
        out.emplace_back("e" + std::to_string(out.size()), std::vector<Dist>(inputs, d(r)));
    return out;
}

} // namespace

TEST(StateReward, Examples)
{
    const RewardTable t(1, 4, {1, 0, 0, 0});
    EXPECT_EQ(state_reward(optimal_expert(t), 0, t), 1.0);
    EXPECT_EQ(state_reward(uniform_policy(t), 0, t), 0.25);
    EXPECT_NEAR(state_reward(noisy_expert(t, 0.5), 0, t), 0.625, 1e-15);
}

TEST(ExpectedReward, PointMassAndLinearity)
{
    Rng rng(201);
    const Instance inst = random_instance(rng, 6, 4);
    const Policy f = random_policy(rng, 6, 4);
    for (std::size_t x = 0; x < 6; ++x)
        EXPECT_NEAR(expected_reward(f, Dist::one_hot(6, x), inst.reward()), state_reward(f, x, inst.reward()), 1e-15);
}

TEST(ExpectedReward, LinearInTheMixtureWeight)
{
    Rng rng(202);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = random_instance(rng, 1 + rng.below(10), 2 + rng.below(6));
        const std::vector<Policy> fg{random_policy(rng, inst.num_inputs(), inst.num_outputs()),
                                     random_policy(rng, inst.num_inputs(), inst.num_outputs())};
        const double a = rng.uniform();
        const std::vector<double> w{a, 1.0 - a};
        const double lhs = expected_reward(mixture_policy(fg, w), inst);
        EXPECT_NEAR(lhs, a * expected_reward(fg[0], inst) + (1.0 - a) * expected_reward(fg[1], inst), 1e-12);
    }
}

TEST(TranscendenceGap, Examples)
{
    Rng rng(203);
    const Instance inst = random_instance(rng, 5, 4);
    const std::vector<Policy> experts{random_policy(rng, 5, 4), random_policy(rng, 5, 4)};
    const Policy& best =
        expected_reward(experts[0], inst) >= expected_reward(experts[1], inst) ? experts[0] : experts[1];
    EXPECT_EQ(transcendence_gap(best, experts, inst.p_test(), inst.reward()), 0.0);

    const RewardTable t(4, 2, {1, 0, 0, 1, 1, 0, 0, 1});
    const auto parts = partition_experts(t, Partition{{0, 1}, {2, 3}});
    const Policy hard = temper(mixture_policy(parts), Temperature::zero(), TemperScheme::PowerOnProbs);
    EXPECT_GT(transcendence_gap(hard, parts, Dist::uniform(4), t), kStrictEps);
}

TEST(ClassifyGap, Boundaries)
{
    EXPECT_EQ(classify_gap(1e-9), GapClass::Tie);
    EXPECT_EQ(classify_gap(2e-9), GapClass::Transcends);
    EXPECT_EQ(classify_gap(-1e-9), GapClass::Below);
    EXPECT_EQ(classify_gap(-5e-10), GapClass::Tie);
    EXPECT_EQ(classify_gap(0.0), GapClass::Tie);
}

TEST(TauGrid, ValidationAndOrder)
{
    const std::vector<double> messy{0.1, 1.0, 1.5, 0.001};
    EXPECT_EQ(theorem_tau_grid(messy), (std::vector<double>{1.0, 0.1, 0.001}));
    const std::vector<double> none{2.0};
    try {
        theorem_tau_grid(none);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::GridEmpty);
    }
    EXPECT_EQ(default_tau_grid().size(), 9u);
}

TEST(Theorem1, Examples)
{
    const Instance inst = uniform_instance(RewardTable(1, 2, {1.0, 0.0}));
    const auto experts = constant_experts(1, {{0.7, 0.3}, {0.3, 0.7}});
    const auto rep = verify_theorem1(inst, experts);
    EXPECT_EQ(rep.verdict, Verdict::Holds);
    EXPECT_NEAR(rep.witness["mixture_reward"].get<double>(), 0.5, 1e-15);
    EXPECT_NEAR(rep.witness["max_expert_reward"].get<double>(), 0.7, 1e-15);

    const auto same = constant_experts(1, {{0.7, 0.3}, {0.7, 0.3}, {0.7, 0.3}});
    const auto eq = verify_theorem1(inst, same);
    EXPECT_NEAR(eq.witness["gap"].get<double>(), 0.0, 1e-15);
}

TEST(Theorem1, HoldsOnRandomInstances)
{
    Rng rng(204);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t nx = 1 + rng.below(20);
        const std::size_t ny = 2 + rng.below(9);
        const Instance inst = random_instance(rng, nx, ny);
        std::vector<Policy> experts;
        const std::size_t k = 1 + rng.below(5);
        for (std::size_t i = 0; i < k; ++i)
            experts.push_back(random_policy(rng, nx, ny, "e", trial % 3 == 0));
        const auto rep = verify_theorem1(inst, experts);
        ASSERT_EQ(rep.verdict, Verdict::Holds) << to_json(rep).dump();
        EXPECT_LE(transcendence_gap(mixture_policy(experts), experts, inst.p_test(), inst.reward()), 1e-12);
    }
}

TEST(Theorem2, PartitionInstanceFindsThreshold)
{
    Rng rng(205);
    const RewardTable t = random_reward_table(rng, 6, 4);
    const Instance inst = uniform_instance(t);
    const auto experts = partition_experts(t, Partition{{0, 1, 2}, {3, 4, 5}});
    for (TemperScheme s : {TemperScheme::SoftmaxOnProbs, TemperScheme::PowerOnProbs}) {
        const auto rep = verify_theorem2(inst, experts, default_tau_grid(), s);
        EXPECT_EQ(rep.verdict, Verdict::Holds);
        EXPECT_TRUE(rep.witness["argmax_transcends"].get<bool>());
        ASSERT_FALSE(rep.witness["tau_star"].is_null());
        const double tau_star = rep.witness["tau_star"].get<double>();
        const auto rewards = rep.witness["grid_rewards"].get<std::vector<double>>();
        const double best = rep.witness["max_expert_reward"].get<double>();
        for (std::size_t i = 0; i < rep.tau_grid.size(); ++i)
            if (rep.tau_grid[i] <= tau_star)
                EXPECT_GT(rewards[i], best + kStrictEps);
    }
}

TEST(Theorem2, SingleOptimalExpertOnlyTies)
{
    Rng rng(206);
    const Instance inst = random_instance(rng, 5, 4);
    const std::vector<Policy> experts{optimal_expert(inst)};
    const auto rep = verify_theorem2(inst, experts, default_tau_grid(), TemperScheme::PowerOnProbs);
    EXPECT_EQ(rep.verdict, Verdict::Holds);
    EXPECT_FALSE(rep.witness["argmax_transcends"].get<bool>());
    EXPECT_TRUE(rep.witness["tau_star"].is_null());
}

TEST(Theorem2, AdversarialArgmaxNeverTranscends)
{
    // Both experts favour the worst output, so the mixture's mode is worst.
    const Instance inst = uniform_instance(RewardTable(2, 3, {0.0, 1.0, 0.5, 0.0, 0.5, 1.0}));
    const auto experts = constant_experts(2, {{0.6, 0.4, 0.0}, {0.5, 0.0, 0.5}});
    for (TemperScheme s : {TemperScheme::SoftmaxOnProbs, TemperScheme::PowerOnProbs}) {
        const auto rep = verify_theorem2(inst, experts, default_tau_grid(), s);
        EXPECT_EQ(rep.verdict, Verdict::Holds);
        EXPECT_EQ(rep.witness["direction"], "reverse");
        EXPECT_TRUE(rep.witness["tau_star"].is_null());
    }
}

TEST(Theorem3, ClosedFormGapAtLowTemperature)
{
    Rng rng(207);
    const Instance inst = random_instance(rng, 6, 4);
    const std::vector<double> rhos{0.5};
    const auto rep = verify_theorem3(inst, rhos, default_tau_grid(), TemperScheme::PowerOnProbs);
    ASSERT_EQ(rep.verdict, Verdict::Holds) << to_json(rep).dump(2);
    const auto& w = rep.witness["per_rho"][0];
    const double expected_gap = w["optimal_reward"].get<double>() - w["expert_reward"].get<double>();
    EXPECT_NEAR(w["smallest_tau_gap"].get<double>(), expected_gap, 1e-6);
}

TEST(Theorem3, HoldsAcrossNoiseLevels)
{
    Rng rng(208);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = random_instance(rng, 1 + rng.below(10), 2 + rng.below(8));
        const std::vector<double> rhos{0.1, 0.3, 0.5, 0.7, 0.9};
        for (TemperScheme s : {TemperScheme::SoftmaxOnProbs, TemperScheme::PowerOnProbs})
            ASSERT_EQ(verify_theorem3(inst, rhos, default_tau_grid(), s).verdict, Verdict::Holds);
    }
}

TEST(Theorem3, GapVanishesAsNoiseVanishes)
{
    Rng rng(209);
    const Instance inst = random_instance(rng, 5, 4);
    const std::vector<double> rhos{1e-3, 1e-6};
    const auto rep = verify_theorem3(inst, rhos, default_tau_grid(), TemperScheme::PowerOnProbs);
    const double g3 = rep.witness["per_rho"][0]["smallest_tau_gap"].get<double>();
    const double g6 = rep.witness["per_rho"][1]["smallest_tau_gap"].get<double>();
    EXPECT_LT(g6, g3);
    EXPECT_LT(g6, 1e-5);
}

TEST(Theorem4, TwoCellsTranscendOneCellTies)
{
    Rng rng(210);
    const RewardTable t = random_reward_table(rng, 6, 4);
    const Partition part{{0, 1, 2}, {3, 4, 5}};
    const std::vector<Dist> cases{Dist::uniform(6), d({0.5, 0.25, 0.25, 0, 0, 0})};
    const auto rep = verify_theorem4(t, Dist::uniform(6), part, cases, default_tau_grid(), TemperScheme::PowerOnProbs);
    ASSERT_EQ(rep.verdict, Verdict::Holds) << to_json(rep).dump(2);
    EXPECT_GT(rep.witness["cases"][0]["smallest_tau_gap"].get<double>(), kStrictEps);
    EXPECT_EQ(rep.witness["cases"][1]["gap_class"], "tie");
    EXPECT_NEAR(rep.witness["cases"][1]["argmax_reward"].get<double>(),
                rep.witness["cases"][1]["matching_expert_reward"].get<double>(), 1e-12);
}

TEST(Theorem4, RandomFiveCellPartitions)
{
    Rng rng(211);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t nx = 5 + rng.below(10);
        const RewardTable t = random_reward_table(rng, nx, 2 + rng.below(6));
        const Partition part = random_partition(rng, nx, 5);
        std::vector<double> single(nx, 0.0);
        for (std::size_t x : part[0])
            single[x] = 1.0;
        const std::vector<Dist> cases{Dist::uniform(nx), normalize(single)};
        for (TemperScheme s : {TemperScheme::SoftmaxOnProbs, TemperScheme::PowerOnProbs})
            ASSERT_EQ(verify_theorem4(t, Dist::uniform(nx), part, cases, default_tau_grid(), s).verdict,
                      Verdict::Holds);
    }
}

TEST(Theorem4, RequiresBothKindsOfCase)
{
    const RewardTable t(4, 2, {1, 0, 0, 1, 1, 0, 0, 1});
    const std::vector<Dist> only_multi{Dist::uniform(4)};
    EXPECT_THROW(verify_theorem4(t, Dist::uniform(4), Partition{{0, 1}, {2, 3}}, only_multi, default_tau_grid(),
                                 TemperScheme::PowerOnProbs),
                 Error);
    const std::vector<Dist> cases{Dist::uniform(4), d({1, 0, 0, 0})};
    try {
        verify_theorem4(t, Dist::uniform(4), Partition{{0, 1}, {1, 2, 3}}, cases, default_tau_grid(),
                        TemperScheme::PowerOnProbs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BadPartition);
    }
}

TEST(TheoremReport, JsonShape)
{
    Rng rng(212);
    const Instance inst = random_instance(rng, 3, 3);
    const std::vector<Policy> experts{optimal_expert(inst), uniform_policy(inst.reward())};
    const auto j = to_json(verify_theorem2(inst, experts, default_tau_grid(), TemperScheme::SoftmaxOnProbs));
    EXPECT_EQ(j["theorem"], 2);
    EXPECT_EQ(j["verdict"], "holds");
    EXPECT_EQ(j["scheme"], "softmax_on_probs");
    EXPECT_EQ(j["tau_grid"].size(), 9u);
}

TEST(Favor, PointwiseExamples)
{
    Rng rng(213);
    const RewardTable t(1, 2, {1.0, 0.0});
    const Policy u = uniform_policy(t);
    const Policy best = optimal_expert(t);
    EXPECT_EQ(favor_pointwise(u, u, 0, t, FavorMode::Exact, 100, rng).favor, 0.0);
    const auto s = favor_pointwise(best, u, 0, t, FavorMode::Exact, 100, rng);
    EXPECT_EQ(s.favor, 0.5);
    EXPECT_EQ(s.favor, s.intervention - s.baseline);
    EXPECT_EQ(s.n, 0u);
}

TEST(Favor, ExactModeIsAntisymmetric)
{
    Rng rng(214);
    for (int trial = 0; trial < 200; ++trial) {
        const RewardTable t = random_reward_table(rng, 3, 5);
        const Policy a = random_policy(rng, 3, 5);
        const Policy b = random_policy(rng, 3, 5);
        for (std::size_t x = 0; x < 3; ++x)
            EXPECT_EQ(favor_pointwise(a, b, x, t, FavorMode::Exact, 1, rng).favor,
                      -favor_pointwise(b, a, x, t, FavorMode::Exact, 1, rng).favor);
    }
}

TEST(Favor, SampledModeAgreesWithExact)
{
    Rng rng(215);
    int within = 0;
    const int trials = 400;
    for (int trial = 0; trial < trials; ++trial) {
        const RewardTable t = random_reward_table(rng, 1, 6);
        const Dist a = random_dist(rng, 6);
        const Dist b = random_dist(rng, 6);
        const auto exact = favor_pointwise(a, b, t.row(0), 0, FavorMode::Exact, 100, rng);
        const auto sampled = favor_pointwise(a, b, t.row(0), 0, FavorMode::Sampled, 100, rng);
        EXPECT_EQ(sampled.n, 100u);
        double var = 0.0;
        for (std::size_t y = 0; y < 6; ++y)
            var += b[y] * (t(0, y) - exact.baseline) * (t(0, y) - exact.baseline);
        if (std::abs(sampled.favor - exact.favor) <= 3.0 * std::sqrt(var) / 10.0)
            ++within;
    }
    EXPECT_GE(within, static_cast<int>(0.95 * trials));
}

TEST(FavorDistribution, IdentityIsAllZero)
{
    Rng rng(216);
    const RewardTable t = random_reward_table(rng, 8, 3);
    const Policy p = random_policy(rng, 8, 3);
    const std::vector<std::size_t> states{0, 1, 2, 3, 4, 5, 6, 7, 7, 7};
    FavorOptions opt;
    opt.bootstrap_resamples = 1000;
    const auto dist = favor_distribution(p, p, states, t, opt, rng);
    EXPECT_EQ(dist.samples.size(), states.size());
    EXPECT_EQ(dist.mean, 0.0);
    EXPECT_TRUE(dist.mean_ci.contains(0.0));
    EXPECT_EQ(dist.histogram.counts[30], states.size());
    const auto j = summary_json(dist);
    EXPECT_EQ(j["histogram"]["counts"].size(), 61u);
    EXPECT_EQ(j["histogram"]["edges"].size(), 62u);

    const std::vector<std::size_t> none;
    try {
        favor_distribution(p, p, none, t, opt, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyStateList);
    }
}

TEST(FavorDistribution, HistogramClampsOutliers)
{
    stats::Histogram h(-0.3, 0.3, 61);
    h.add(-5.0);
    h.add(5.0);
    h.add(0.0);
    EXPECT_EQ(h.counts.front(), 1u);
    EXPECT_EQ(h.counts.back(), 1u);
    EXPECT_EQ(h.counts[30], 1u);
}

TEST(Bootstrap, ZeroMeanCoverage)
{
    Rng rng(217);
    int covered = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(60);
        for (double& x : v)
            x = rng.uniform(-1.0, 1.0);
        if (stats::bootstrap_mean_ci(v, 2000, 0.95, rng).contains(0.0))
            ++covered;
    }
    EXPECT_GE(covered, 90);
}

TEST(Stats, MedianAndQuantiles)
{
    const std::vector<double> odd{3, 1, 2};
    const std::vector<double> even{4, 1, 3, 2};
    EXPECT_EQ(stats::median(odd), 2.0);
    EXPECT_EQ(stats::median(even), 2.5);
    const std::vector<double> sorted{0, 10};
    EXPECT_EQ(stats::quantile_sorted(sorted, 0.25), 2.5);
}
