#pragma once

#include <cstdint>
#include <vector>

namespace nsrl {

/// Per-(h,s,a) stage lengths e_1 = H, e_{i+1} = floor((1 + 1/H) e_i), and the
/// stage ending times L (prefix sums of the lengths).
struct StageSchedule {
    std::vector<std::int64_t> lengths;
    std::vector<std::int64_t> ends;
};

/// All stages whose ending time is <= n_max.
StageSchedule stage_ends(int H, std::int64_t n_max);

/// Next stage length after a stage of length `len`.
inline std::int64_t next_stage_length(std::int64_t len, int H) { return len + len / H; }

/// Partition of episodes 1..M into consecutive epochs. Restarts happen at
/// every epoch start.
class EpochPlan {
public:
    /// D epochs of K = ceil(M/D) episodes; the last epoch may be shorter.
    static EpochPlan from_count(int M, int D);
    /// Epochs of exactly K episodes, except possibly the last.
    static EpochPlan from_length(int M, int K);
    /// Single epoch (never restarts).
    static EpochPlan single(int M) { return from_count(M, 1); }

    int M() const { return M_; }
    int D() const { return D_; }
    int K() const { return K_; }
    int epochs() const { return static_cast<int>(starts_.size()); }

    /// 1-based first and last episodes of epoch d (0-based).
    int first(int d) const { return starts_[static_cast<std::size_t>(d)]; }
    int last(int d) const;

    /// 0-based epoch containing episode m.
    int epoch_of(int m) const { return (m - 1) / K_; }
    bool is_restart(int m) const { return (m - 1) % K_ == 0; }

    const std::vector<int>& starts() const { return starts_; }

private:
    int M_ = 1, D_ = 1, K_ = 1;
    std::vector<int> starts_;
};

}  // namespace nsrl
