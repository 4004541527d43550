#pragma once

// Shared data model for finite-horizon, episode-indexed MDPs.
//
// Steps are 0-based throughout the library: step h in [0, H) corresponds to
// the h+1-th decision of an episode. Episodes are 1-based: m in [1, M].

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsrl {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool cond, const char* what) {
    if (!cond) throw ContractViolation(what);
}

struct EpisodeGrid {
    int M = 1;
    int H = 1;

    EpisodeGrid() = default;
    EpisodeGrid(int episodes, int horizon) : M(episodes), H(horizon) {
        require(M >= 1 && H >= 1, "EpisodeGrid: M and H must be positive");
    }
    std::int64_t T() const { return static_cast<std::int64_t>(M) * H; }
};

/// One episode's full model: transitions P[h][s][a][s'], mean rewards
/// r[h][s][a] and a valid-action mask[h][s][a].
class MdpSnapshot {
public:
    MdpSnapshot() = default;
    MdpSnapshot(int H, int S, int A);

    int H() const { return H_; }
    int S() const { return S_; }
    int A() const { return A_; }

    double& p(int h, int s, int a, int next) { return P_[pidx(h, s, a, next)]; }
    double p(int h, int s, int a, int next) const { return P_[pidx(h, s, a, next)]; }

    double& r(int h, int s, int a) { return R_[ridx(h, s, a)]; }
    double r(int h, int s, int a) const { return R_[ridx(h, s, a)]; }

    bool valid(int h, int s, int a) const { return mask_[ridx(h, s, a)] != 0; }
    void set_valid(int h, int s, int a, bool v) { mask_[ridx(h, s, a)] = v ? 1 : 0; }

    /// Pointer to the S-long next-state distribution of (h,s,a).
    const double* row(int h, int s, int a) const { return P_.data() + pidx(h, s, a, 0); }
    double* row(int h, int s, int a) { return P_.data() + pidx(h, s, a, 0); }

    /// Rescale every valid row to sum to exactly one (up to rounding).
    void normalize_rows();

    bool operator==(const MdpSnapshot&) const = default;

private:
    std::size_t ridx(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
    }
    std::size_t pidx(int h, int s, int a, int next) const { return ridx(h, s, a) * S_ + next; }

    int H_ = 0, S_ = 0, A_ = 0;
    std::vector<double> P_;
    std::vector<double> R_;
    std::vector<std::uint8_t> mask_;
};

/// Deterministic policy: action[h][s].
struct TabularPolicy {
    int H = 0;
    int S = 0;
    std::vector<int> actions;

    TabularPolicy() = default;
    TabularPolicy(int horizon, int states, int fill = 0)
        : H(horizon), S(states), actions(static_cast<std::size_t>(horizon) * states, fill) {}

    int& at(int h, int s) { return actions[static_cast<std::size_t>(h) * S + s]; }
    int at(int h, int s) const { return actions[static_cast<std::size_t>(h) * S + s]; }

    bool operator==(const TabularPolicy&) const = default;
};

enum class ViolationKind { RowSum, NegativeProbability, RewardRange, NoValidAction, Shape };

const char* to_string(ViolationKind kind);

struct Violation {
    int h = 0;
    int s = 0;
    int a = -1;  // -1 when the violation concerns a whole (h,s)
    ViolationKind kind = ViolationKind::RowSum;
    double value = 0.0;
};

using ValidationReport = std::vector<Violation>;

inline constexpr double kRowSumTolerance = 1e-9;

ValidationReport validate_snapshot(const MdpSnapshot& snap);

/// Throws ContractViolation when `policy` picks a masked action or has the
/// wrong shape for `snap`.
void check_policy(const MdpSnapshot& snap, const TabularPolicy& policy);

struct EpisodeRecord {
    int episode = 0;
    int initial_state = 0;
    double reward = 0.0;
    double cumulative_reward = 0.0;
    int epoch = 0;
    int arm = -1;                    // Double-Restart only
    std::vector<int> sales;          // inventory audit columns
    std::vector<int> next_states;
};

struct RunTrace {
    std::uint64_t seed = 0;
    std::string agent;
    std::string env;
    std::vector<EpisodeRecord> episodes;
    std::vector<TabularPolicy> policies;  // empty unless policy recording is on

    /// Appends an episode and maintains the cumulative-reward prefix sum.
    EpisodeRecord& append(EpisodeRecord rec);
};

}  // namespace nsrl
