#include <gtest/gtest.h>

#include "nsrl/model.hpp"
#include "nsrl/schedule.hpp"

using namespace nsrl;

TEST(StageEnds, HorizonFive) {
    const auto st = stage_ends(5, 50);
    EXPECT_EQ(st.lengths, (std::vector<std::int64_t>{5, 6, 7, 8, 9, 10}));
    EXPECT_EQ(st.ends, (std::vector<std::int64_t>{5, 11, 18, 26, 35, 45}));
}

TEST(StageEnds, HorizonOneDoubles) {
    const auto st = stage_ends(1, 15);
    EXPECT_EQ(st.lengths, (std::vector<std::int64_t>{1, 2, 4, 8}));
    EXPECT_EQ(st.ends, (std::vector<std::int64_t>{1, 3, 7, 15}));
}

TEST(StageEnds, BelowFirstBoundaryIsEmpty) {
    EXPECT_TRUE(stage_ends(5, 4).ends.empty());
    EXPECT_EQ(stage_ends(5, 5).ends.size(), 1u);
}

TEST(StageEnds, LengthsGrowByOneOverH) {
    const auto st = stage_ends(3, 100000);
    for (std::size_t i = 1; i < st.lengths.size(); ++i) {
        EXPECT_EQ(st.lengths[i], st.lengths[i - 1] + st.lengths[i - 1] / 3);
        EXPECT_EQ(st.ends[i], st.ends[i - 1] + st.lengths[i]);
    }
}

TEST(StageEnds, RejectsNonPositive) {
    EXPECT_THROW(stage_ends(0, 10), ContractViolation);
    EXPECT_THROW(stage_ends(2, 0), ContractViolation);
}

TEST(EpochPlanTest, EvenCount) {
    const auto plan = EpochPlan::from_count(5000, 5);
    EXPECT_EQ(plan.K(), 1000);
    EXPECT_EQ(plan.epochs(), 5);
    for (int d = 0; d < 5; ++d) {
        EXPECT_EQ(plan.first(d), 1000 * d + 1);
        EXPECT_EQ(plan.last(d), 1000 * (d + 1));
    }
    EXPECT_TRUE(plan.is_restart(1001));
    EXPECT_FALSE(plan.is_restart(1000));
    EXPECT_EQ(plan.epoch_of(4001), 4);
}

TEST(EpochPlanTest, ShortLastEpoch) {
    const auto plan = EpochPlan::from_count(10, 3);
    EXPECT_EQ(plan.K(), 4);
    EXPECT_EQ(plan.starts(), (std::vector<int>{1, 5, 9}));
    EXPECT_EQ(plan.last(2), 10);
}

TEST(EpochPlanTest, FromLengthAndSingle) {
    const auto plan = EpochPlan::from_length(7, 3);
    EXPECT_EQ(plan.starts(), (std::vector<int>{1, 4, 7}));
    EXPECT_EQ(plan.last(2), 7);
    const auto one = EpochPlan::single(12);
    EXPECT_EQ(one.epochs(), 1);
    EXPECT_EQ(one.last(0), 12);
    for (int m = 2; m <= 12; ++m) EXPECT_FALSE(one.is_restart(m));
}

TEST(EpochPlanTest, EpochsCoverEveryEpisodeOnce) {
    for (int M : {1, 2, 17, 100})
        for (int D : {1, 3, 7, 100}) {
            const auto plan = EpochPlan::from_count(M, D);
            int covered = 0;
            for (int d = 0; d < plan.epochs(); ++d) {
                EXPECT_LE(plan.first(d), plan.last(d));
                covered += plan.last(d) - plan.first(d) + 1;
            }
            EXPECT_EQ(covered, M);
            EXPECT_EQ(plan.last(plan.epochs() - 1), M);
        }
}
