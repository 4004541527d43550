#include <gtest/gtest.h>

#include <cmath>

#include "nsrl/envs.hpp"
#include "nsrl/oracle.hpp"

using namespace nsrl;

namespace {

LockConfig reference_lock() {
    LockConfig c;
    c.M = 5000;
    c.H = 5;
    c.A = 2;
    c.success_prob = 0.98;
    c.sink_reward = 1.0 / 40.0;
    c.good_reward = 1.0;
    c.bad_reward = 0.25;
    c.variation = LockVariation::Abrupt;
    c.period = 1000;
    return c;
}

}  // namespace

TEST(Lock, LayoutHasTenStatesAtH5) {
    const auto env = build_lock(reference_lock());
    EXPECT_EQ(env.S(), 10);
    EXPECT_EQ(env.A(), 2);
    EXPECT_EQ(env.T(), 25000);
    EXPECT_EQ(env.initial_state(1), 0);
}

TEST(Lock, AbruptSwapsEndpointsEveryPeriod) {
    const auto cfg = reference_lock();
    const auto env = build_lock(cfg);
    const LockLayout L{cfg.H};
    const int end0 = L.path_state(0, cfg.H - 1), end1 = L.path_state(1, cfg.H - 1);
    const int h = cfg.H - 1;
    for (int m : {1, 1000, 2001, 4001, 5000}) {
        const auto s = env.snapshot(m);
        EXPECT_DOUBLE_EQ(s->r(h, end0, 0), 1.0) << m;
        EXPECT_DOUBLE_EQ(s->r(h, end1, 1), 0.25) << m;
    }
    for (int m : {1001, 2000, 3001, 4000}) {
        const auto s = env.snapshot(m);
        EXPECT_DOUBLE_EQ(s->r(h, end0, 0), 0.25) << m;
        EXPECT_DOUBLE_EQ(s->r(h, end1, 1), 1.0) << m;
    }
    EXPECT_EQ(*env.snapshot(1), *env.snapshot(999));
    EXPECT_FALSE(*env.snapshot(1000) == *env.snapshot(1001));
}

TEST(Lock, NoVariationIsStationary) {
    auto cfg = reference_lock();
    cfg.variation = LockVariation::None;
    const auto env = build_lock(cfg);
    EXPECT_EQ(*env.snapshot(1), *env.snapshot(cfg.M));
}

TEST(Lock, GradualMidpointRouting) {
    auto cfg = reference_lock();
    cfg.variation = LockVariation::Gradual;
    EXPECT_DOUBLE_EQ(lock_routing_prob(cfg, 1), 0.98);
    EXPECT_NEAR(lock_routing_prob(cfg, cfg.M), 0.02, 1e-15);
    EXPECT_NEAR(lock_routing_prob(cfg, 2501), 0.98 - 0.96 * 2500.0 / 4999.0, 1e-15);
    EXPECT_NEAR(lock_routing_prob(cfg, 2501), 0.5, 1e-3);

    const auto env = build_lock(cfg);
    const LockLayout L{cfg.H};
    const auto mid = env.snapshot(2501);
    EXPECT_NEAR(mid->p(0, L.start(), 0, L.path_state(0, 1)), 0.98 - 0.96 * 2500.0 / 4999.0, 1e-15);
    EXPECT_NEAR(mid->p(0, L.start(), 1, L.path_state(1, 1)), 0.98 - 0.96 * 2500.0 / 4999.0, 1e-15);
}

TEST(Lock, GradualOnlyTouchesStartRows) {
    auto cfg = reference_lock();
    cfg.variation = LockVariation::Gradual;
    const auto env = build_lock(cfg);
    const auto a = env.snapshot(1), b = env.snapshot(cfg.M);
    for (int h = 0; h < cfg.H; ++h)
        for (int s = 0; s < env.S(); ++s)
            for (int x = 0; x < env.A(); ++x) {
                EXPECT_EQ(a->r(h, s, x), b->r(h, s, x));
                if (h == 0 && s == 0) continue;
                for (int k = 0; k < env.S(); ++k) EXPECT_EQ(a->p(h, s, x, k), b->p(h, s, x, k));
            }
}

TEST(Lock, SinkPaysPerStepReward) {
    const auto cfg = reference_lock();
    const auto env = build_lock(cfg);
    const LockLayout L{cfg.H};
    const auto snap = env.snapshot(1);
    Rng rng(3);
    for (int h = 1; h < cfg.H; ++h) {
        const auto out = sample_step(*snap, h, L.sink(), 0, rng);
        EXPECT_EQ(out.next_state, L.sink());
        EXPECT_DOUBLE_EQ(out.reward, 1.0 / 40.0);
    }
}

TEST(Lock, CorrectAndWrongActions) {
    const auto cfg = reference_lock();
    const auto env = build_lock(cfg);
    const auto correct = lock_correct_actions(cfg);
    const LockLayout L{cfg.H};
    const auto snap = env.snapshot(1);
    for (int path = 0; path < 2; ++path)
        for (int d = 1; d <= cfg.H - 2; ++d) {
            const int s = L.path_state(path, d);
            const int good = correct[static_cast<std::size_t>(path)][static_cast<std::size_t>(d)];
            ASSERT_GE(good, 0);
            EXPECT_DOUBLE_EQ(snap->r(d, s, good), 0.0);
            EXPECT_DOUBLE_EQ(snap->p(d, s, good, L.path_state(path, d + 1)), 0.98);
            EXPECT_NEAR(snap->p(d, s, good, L.sink()), 0.02, 1e-15);
            const int bad = 1 - good;
            EXPECT_DOUBLE_EQ(snap->r(d, s, bad), 1.0 / 40.0);
            EXPECT_DOUBLE_EQ(snap->p(d, s, bad, L.sink()), 1.0);
        }
}

TEST(Lock, DefaultSinkRewardIsOneOverEightH) {
    LockConfig cfg;
    cfg.H = 4;
    cfg.M = 10;
    cfg.period = 5;
    const auto env = build_lock(cfg);
    const LockLayout L{cfg.H};
    EXPECT_DOUBLE_EQ(env.snapshot(1)->r(2, L.sink(), 0), 1.0 / 32.0);
}

TEST(Lock, RejectsDegenerateHorizon) {
    auto cfg = reference_lock();
    cfg.H = 1;
    EXPECT_THROW(build_lock(cfg), ContractViolation);
}

TEST(Lock, EverySnapshotValidates) {
    for (auto v : {LockVariation::None, LockVariation::Abrupt, LockVariation::Gradual}) {
        auto cfg = reference_lock();
        cfg.variation = v;
        const auto env = build_lock(cfg);
        for (int m : {1, 1000, 1001, 2500, 5000}) EXPECT_TRUE(validate_snapshot(*env.snapshot(m)).empty());
    }
}

TEST(Jao, OptimalAverageReward) {
    EXPECT_NEAR(jao_optimal_average_reward(0.2, 0.1), 0.6, 1e-15);
}

TEST(Jao, GoodActionFrequencyMatchesMonteCarlo) {
    JaoChainConfig cfg;
    cfg.M = 10;
    cfg.segment_length = 10;
    const auto env = build_jao_chain(cfg);
    const int star = jao_good_actions(cfg)[0];
    const auto snap = env.snapshot(1);
    Rng rng(11);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += sample_step(*snap, 0, kJaoLow, star, rng).next_state == kJaoHigh ? 1 : 0;
    const double p = 0.3, sigma = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(hits) / n, p, 3 * sigma);
}

TEST(Jao, ZeroEpsilonHasNoDistinguishedAction) {
    JaoChainConfig cfg;
    cfg.A = 3;
    cfg.epsilon = 0.0;
    const auto snap = build_jao_chain(cfg).snapshot(1);
    for (int h = 0; h < cfg.H; ++h)
        for (int s = 0; s < 2; ++s)
            for (int a = 1; a < cfg.A; ++a)
                for (int k = 0; k < 2; ++k) EXPECT_EQ(snap->p(h, s, a, k), snap->p(h, s, 0, k));
}

TEST(Jao, RewardsAndReset) {
    JaoChainConfig cfg;
    const auto env = build_jao_chain(cfg);
    const auto snap = env.snapshot(1);
    EXPECT_EQ(env.initial_state(7), kJaoLow);
    for (int h = 0; h < cfg.H; ++h) {
        EXPECT_EQ(snap->r(h, kJaoLow, 0), 0.0);
        EXPECT_EQ(snap->r(h, kJaoHigh, 1), 1.0);
        EXPECT_DOUBLE_EQ(snap->p(h, kJaoHigh, 0, kJaoLow), cfg.delta);
    }
}

TEST(Jao, RejectsEpsilonAtLeastDelta) {
    JaoChainConfig cfg;
    cfg.epsilon = 0.2;
    EXPECT_THROW(build_jao_chain(cfg), ContractViolation);
    cfg.epsilon = 0.1;
    cfg.S = 3;
    EXPECT_THROW(build_jao_chain(cfg), ContractViolation);
}

TEST(Jao, SegmentsResampleGoodAction) {
    JaoChainConfig cfg;
    cfg.A = 4;
    cfg.M = 1000;
    cfg.segment_length = 250;
    cfg.seed = 5;
    const auto good = jao_good_actions(cfg);
    ASSERT_EQ(good.size(), 4u);
    const auto env = build_jao_chain(cfg);
    for (int seg = 0; seg < 4; ++seg) {
        const auto snap = env.snapshot(seg * 250 + 1);
        EXPECT_NEAR(snap->p(0, kJaoLow, good[static_cast<std::size_t>(seg)], kJaoHigh), 0.3, 1e-15);
    }
}

TEST(SampleStep, PointMassRow) {
    MdpSnapshot snap(1, 4, 1);
    snap.p(0, 0, 0, 3) = 1.0;
    for (int s = 1; s < 4; ++s) snap.p(0, s, 0, s) = 1.0;
    snap.r(0, 0, 0) = 0.7;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto out = sample_step(snap, 0, 0, 0, rng);
        EXPECT_EQ(out.next_state, 3);
        EXPECT_DOUBLE_EQ(out.reward, 0.7);
    }
}

TEST(SampleStep, MaskedActionThrows) {
    MdpSnapshot snap(1, 1, 2);
    snap.p(0, 0, 0, 0) = 1.0;
    snap.set_valid(0, 0, 1, false);
    Rng rng(1);
    EXPECT_THROW(sample_step(snap, 0, 0, 1, rng), ContractViolation);
}

TEST(SampleStep, SeedReproducible) {
    JaoChainConfig cfg;
    const auto snap = build_jao_chain(cfg).snapshot(1);
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_step(*snap, 0, 0, 0, a).next_state, sample_step(*snap, 0, 0, 0, b).next_state);
}

TEST(SampleStep, BernoulliRewardsKeepTheMean) {
    MdpSnapshot snap(1, 1, 1);
    snap.p(0, 0, 0, 0) = 1.0;
    snap.r(0, 0, 0) = 0.25;
    Rng rng(8);
    const int n = 100000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const double r = sample_step(snap, 0, 0, 0, rng, true).reward;
        ASSERT_TRUE(r == 0.0 || r == 1.0);
        sum += r;
    }
    EXPECT_NEAR(sum / n, 0.25, 3 * std::sqrt(0.25 * 0.75 / n));
}
