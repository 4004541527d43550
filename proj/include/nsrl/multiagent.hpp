#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nsrl/envs.hpp"
#include "nsrl/model.hpp"
#include "nsrl/rng.hpp"

namespace nsrl {

/// Two-player episodic team: common reward r[h][s][a1][a2] in [0,1] and
/// joint transitions P[h][s][a1][a2][s'].
class TeamModel {
public:
    TeamModel() = default;
    TeamModel(int H, int S, int A1, int A2);

    int H() const { return H_; }
    int S() const { return S_; }
    int A1() const { return A1_; }
    int A2() const { return A2_; }

    double& r(int h, int s, int a1, int a2) { return r_[idx(h, s, a1, a2)]; }
    double r(int h, int s, int a1, int a2) const { return r_[idx(h, s, a1, a2)]; }
    double& p(int h, int s, int a1, int a2, int next) { return P_[idx(h, s, a1, a2) * S_ + next]; }
    double p(int h, int s, int a1, int a2, int next) const { return P_[idx(h, s, a1, a2) * S_ + next]; }
    const double* row(int h, int s, int a1, int a2) const { return P_.data() + idx(h, s, a1, a2) * S_; }

    /// Rows sum to one within 1e-9 and rewards lie in [0,1].
    bool valid() const;

    /// Dirichlet-like random team (uniform weights, normalized).
    static TeamModel random(int H, int S, int A1, int A2, Rng& rng);

private:
    std::size_t idx(int h, int s, int a1, int a2) const {
        return ((static_cast<std::size_t>(h) * S_ + s) * A1_ + a1) * A2_ + a2;
    }
    int H_ = 0, S_ = 0, A1_ = 0, A2_ = 0;
    std::vector<double> r_;
    std::vector<double> P_;
};

/// Deterministic per-episode policies of the second agent, episode m at
/// index m-1.
struct OpponentSchedule {
    std::vector<TabularPolicy> policies;
};

/// Number of (h, s) pairs where two deterministic policies disagree.
int policy_switches(const TabularPolicy& x, const TabularPolicy& y);

/// Sum of policy_switches over consecutive episodes.
std::int64_t switching_cost(const OpponentSchedule& schedule);

/// Opponent schedule that changes one random (h, s) entry every `period`
/// episodes, starting from `initial`.
OpponentSchedule periodic_opponent(const TeamModel& team, int M, int period,
                                   const TabularPolicy& initial, Rng& rng);

/// Agent 1's view of the team when agent 2 follows `schedule`: the opponent
/// action is substituted and never observable.
NonstationaryEnv wrap_team(const TeamModel& team, const OpponentSchedule& schedule);

/// Joint value V^{(pi1, pi2)} as an (H+1) x S table.
std::vector<double> joint_value(const TeamModel& team, const TabularPolicy& pi1,
                                const TabularPolicy& pi2);

struct SmoothnessWitness {
    TabularPolicy pi1_star, pi2_star;
    TabularPolicy pi1, pi2;
    int h = 0, s = 0;
    bool optimality_violated = false;  // first inequality; otherwise the second
    double lhs = 0.0, rhs = 0.0;
};

struct SmoothnessResult {
    bool smooth = false;
    std::optional<TabularPolicy> pi1_star, pi2_star;  // set when smooth
    std::optional<SmoothnessWitness> witness;         // set when not smooth
    std::int64_t pairs_checked = 0;
};

inline constexpr double kMaxPolicyPairs = 1e6;

/// Brute force over deterministic policy pairs. Throws ContractViolation when
/// |Pi1| * |Pi2| exceeds kMaxPolicyPairs.
SmoothnessResult verify_smoothness(const TeamModel& team, double lambda, double mu);

}  // namespace nsrl
