#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "nsrl/envs.hpp"
#include "nsrl/meta_bandit.hpp"

using namespace nsrl;

TEST(CandidateGrid, WorkedExample) {
    const auto g = candidate_grid(100000, 2, 2, 5);
    EXPECT_EQ(g.W, 707);
    EXPECT_EQ(g.J, 7);
    ASSERT_EQ(g.values.size(), 8u);
    EXPECT_EQ(g.values.front(), 1);
    EXPECT_EQ(g.values.back(), 1000);
    for (int j = 0; j <= 7; ++j) {
        const double raw = 100000.0 * std::pow(707.0, j / 7.0) / (2.0 * 2.0 * 25.0 * 707.0);
        EXPECT_EQ(g.values[static_cast<std::size_t>(j)], std::max(1, static_cast<int>(std::floor(raw + 1e-9))));
    }
}

TEST(CandidateGrid, SmallScaleClampsToOne) {
    const auto g = candidate_grid(25000, 10, 2, 5);
    EXPECT_EQ(g.W, 353);
    EXPECT_EQ(g.J, 6);
    EXPECT_EQ(g.values.front(), 1);
    for (int v : g.values) EXPECT_GE(v, 1);
}

TEST(Exp3PParamsTest, WorkedExample) {
    const auto p = exp3p_params(20000, 707, 7, 0.1);
    EXPECT_NEAR(p.alpha, 2.0 * std::sqrt(std::log(2320.0)), 1e-12);
    EXPECT_NEAR(p.alpha, 5.567, 1e-3);
    EXPECT_DOUBLE_EQ(p.gamma, 0.6);
}

TEST(Exp3PParamsTest, SingleArmHasNoExploration) {
    EXPECT_EQ(exp3p_params(1000, 10, 0, 0.1).gamma, 0.0);
}

TEST(Exp3PParamsTest, SmallGammaBranch) {
    const auto p = exp3p_params(1000000, 10, 1, 0.1);
    EXPECT_NEAR(p.gamma, 2.0 * std::sqrt(0.6 * 2.0 * std::log(2.0) / 100000.0), 1e-15);
}

TEST(Exp3PTest, UniformStart) {
    Exp3P b(4, 10, {1.0, 0.6});
    for (double p : b.probabilities()) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(Exp3PTest, DominantWeightLimit) {
    Exp3P b(4, 1, {0.0, 0.6});
    // Push arm 2 far ahead: p -> 0.4 + 0.15.
    for (int i = 0; i < 20000; ++i) b.update(2, 1.0, 1.0);
    const auto p = b.probabilities();
    EXPECT_NEAR(p[2], 0.55, 1e-9);
    EXPECT_NEAR(p[0], 0.15, 1e-9);
}

TEST(Exp3PTest, FullExplorationIgnoresWeights) {
    Exp3P b(3, 5, {0.0, 1.0});
    b.update(1, 1.0, 1.0);
    for (double p : b.probabilities()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(Exp3PTest, ImportanceWeightedEstimate) {
    // W = 10, H = 2, p = 0.25, reward 5: estimate 5 / (20 * 0.25) = 1.
    Exp3P b(4, 10, {0.0, 0.6});
    const auto before = b.log_weights();
    b.update(0, 5.0, 20.0);
    const double rate = 0.6 / (3.0 * 4.0);
    EXPECT_NEAR(b.log_weights()[0] - before[0], rate * 1.0, 1e-15);
    for (std::size_t j = 1; j < 4; ++j) EXPECT_EQ(b.log_weights()[j], before[j]);
}

TEST(Exp3PTest, ZeroExponentLeavesWeights) {
    Exp3P b(3, 10, {0.0, 0.6});
    const auto before = b.log_weights();
    b.update(1, 0.0, 4.0);
    EXPECT_EQ(b.log_weights(), before);
}

TEST(Exp3PTest, RejectsRewardOutOfRange) {
    Exp3P b(2, 10, {1.0, 0.5});
    EXPECT_THROW(b.update(0, 5.0, 4.0), ContractViolation);
    EXPECT_THROW(b.update(0, -1.0, 4.0), ContractViolation);
    EXPECT_THROW(b.update(2, 1.0, 4.0), ContractViolation);
}

TEST(Exp3PTest, FloorAndNormalizationUnderUpdates) {
    const auto params = exp3p_params(5000, 10, 5, 0.1);
    Exp3P b(6, 500, params);
    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        const int arm = b.draw(rng);
        b.update(arm, arm == 3 ? 10.0 : 10.0 * rng.uniform() * 0.3, 10.0);
        const auto p = b.probabilities();
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
        for (double x : p) EXPECT_GE(x, params.gamma / 6.0 - 1e-15);
    }
}

TEST(Exp3PTest, DrawFollowsProbabilities) {
    Exp3P b(3, 1, {0.0, 0.6});
    for (int i = 0; i < 200; ++i) b.update(0, 1.0, 1.0);
    const auto p = b.probabilities();
    Rng rng(9);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += b.draw(rng) == 0 ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(hits) / n, p[0], 3 * std::sqrt(p[0] * (1 - p[0]) / n));
}

TEST(DoubleRestart, CoversEveryEpisode) {
    JaoChainConfig cfg;
    cfg.M = 600;
    cfg.H = 3;
    cfg.segment_length = 150;
    const auto env = build_jao_chain(cfg);
    Rng rng(1);
    DoubleRestartOptions opts;
    opts.agent_delta = 1.9;
    const auto res = run_double_restart(env, rng, opts);
    ASSERT_EQ(res.trace.episodes.size(), 600u);
    for (int m = 1; m <= 600; ++m) EXPECT_EQ(res.trace.episodes[static_cast<std::size_t>(m) - 1].episode, m);
    int covered = 0;
    for (const auto& ph : res.phases) {
        EXPECT_EQ(ph.first_episode, covered + 1);
        covered += ph.episodes;
        const double total = std::accumulate(ph.probabilities.begin(), ph.probabilities.end(), 0.0);
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_GE(ph.epochs, 1);
        EXPECT_LE(ph.epochs, cfg.M);
    }
    EXPECT_EQ(covered, 600);
    EXPECT_EQ(res.phases.size(), static_cast<std::size_t>((600 + res.grid.W - 1) / res.grid.W));
}

TEST(DoubleRestart, SingleCandidateMatchesPlainRestart) {
    JaoChainConfig cfg;
    cfg.M = 400;
    cfg.H = 3;
    cfg.segment_length = 100;
    const auto env = build_jao_chain(cfg);
    CandidateGrid grid;
    grid.W = cfg.M;
    grid.J = 0;
    grid.values = {4};

    DoubleRestartOptions opts;
    opts.grid = grid;
    opts.agent_delta = 1.9;
    opts.ref_threshold = 50;
    Rng ra(21);
    const auto res = run_double_restart(env, ra, opts);

    QUcbOptions q;
    q.bonus = BonusKind::Freedman;
    q.delta = 1.9;
    q.ref_threshold = 50;
    QUcbAgent agent(AgentShape::of(*env.snapshot(1)), q);
    Rng rb(21);
    (void)rb.uniform();  // the single-arm draw
    const auto plain = run_restart(env, agent, EpochPlan::from_length(cfg.M, 100), rb);
    ASSERT_EQ(res.trace.episodes.size(), plain.episodes.size());
    for (std::size_t i = 0; i < plain.episodes.size(); ++i) {
        EXPECT_EQ(res.trace.episodes[i].reward, plain.episodes[i].reward) << i;
        EXPECT_EQ(res.trace.episodes[i].epoch, plain.episodes[i].epoch) << i;
    }
}
