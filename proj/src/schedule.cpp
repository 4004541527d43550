#include "nsrl/schedule.hpp"

#include "nsrl/model.hpp"

namespace nsrl {

StageSchedule stage_ends(int H, std::int64_t n_max) {
    require(H >= 1 && n_max >= 1, "stage_ends: H and n_max must be positive");
    StageSchedule out;
    std::int64_t len = H;
    std::int64_t end = len;
    while (end <= n_max) {
        out.lengths.push_back(len);
        out.ends.push_back(end);
        len = next_stage_length(len, H);
        end += len;
    }
    return out;
}

EpochPlan EpochPlan::from_count(int M, int D) {
    require(M >= 1 && D >= 1, "EpochPlan: M and D must be positive");
    EpochPlan plan = from_length(M, (M + D - 1) / D);
    plan.D_ = D;
    return plan;
}

EpochPlan EpochPlan::from_length(int M, int K) {
    require(M >= 1 && K >= 1, "EpochPlan: M and K must be positive");
    EpochPlan plan;
    plan.M_ = M;
    plan.K_ = K;
    for (int m = 1; m <= M; m += K) plan.starts_.push_back(m);
    plan.D_ = static_cast<int>(plan.starts_.size());
    return plan;
}

int EpochPlan::last(int d) const {
    const auto next = static_cast<std::size_t>(d) + 1;
    return next < starts_.size() ? starts_[next] - 1 : M_;
}

}  // namespace nsrl
