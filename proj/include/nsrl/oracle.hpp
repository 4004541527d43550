#pragma once

#include <optional>
#include <vector>

#include "nsrl/envs.hpp"
#include "nsrl/model.hpp"
#include "nsrl/schedule.hpp"

namespace nsrl {

/// Optimal values of one snapshot. V has H+1 rows with V[H] = 0.
struct ValueTables {
    int H = 0, S = 0, A = 0;
    std::vector<double> V;
    std::vector<double> Q;

    double v(int h, int s) const { return V[static_cast<std::size_t>(h) * S + s]; }
    double q(int h, int s, int a) const { return Q[(static_cast<std::size_t>(h) * S + s) * A + a]; }
};

/// Exact backward induction. Masked actions are excluded from the max and
/// their Q entries are left at -infinity.
ValueTables optimal_values(const MdpSnapshot& snap);

/// Greedy policy w.r.t. Q*, lowest valid action index on ties.
TabularPolicy greedy_policy(const MdpSnapshot& snap, const ValueTables& values);

/// V^pi as an (H+1) x S table, row H being zero.
std::vector<double> policy_value(const MdpSnapshot& snap, const TabularPolicy& policy);

struct RegretSeries {
    std::vector<double> per_episode;
    std::vector<double> cumulative;
    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// V*_1(s_1) - V^pi_1(s_1) for one episode.
double episode_regret(const MdpSnapshot& snap, const TabularPolicy& policy, int initial_state);

/// Exact dynamic regret of a per-episode policy sequence starting at
/// episode `first_episode`.
RegretSeries dynamic_regret(const NonstationaryEnv& env, const std::vector<TabularPolicy>& policies,
                            const std::vector<int>& initial_states, int first_episode = 1);

struct LocalBudget {
    int first = 1;
    int last = 1;
    double delta_r = 0.0;
    double delta_p = 0.0;
};

struct BudgetReport {
    double delta_r = 0.0;
    double delta_p = 0.0;
    std::vector<double> per_step_r;  // summed over episode pairs, per step h
    std::vector<double> per_step_p;
    std::vector<LocalBudget> locals;  // one per epoch when a plan is given

    double total() const { return delta_r + delta_p; }
};

/// Reward sup-difference and transition L1 sup-difference between two
/// snapshots at step h, over (s,a) valid in both.
std::pair<double, double> snapshot_step_distance(const MdpSnapshot& a, const MdpSnapshot& b, int h);

/// Variation budgets over adjacent episode pairs inside [first, last].
/// With a plan, per-epoch local budgets only count pairs inside one epoch.
BudgetReport variation_budgets(const NonstationaryEnv& env, int first, int last,
                               const EpochPlan* plan = nullptr);

inline BudgetReport variation_budgets(const NonstationaryEnv& env) {
    return variation_budgets(env, 1, env.M());
}

}  // namespace nsrl
