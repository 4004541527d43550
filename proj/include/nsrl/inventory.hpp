#pragma once

#include <functional>
#include <vector>

#include "nsrl/envs.hpp"
#include "nsrl/model.hpp"
#include "nsrl/rng.hpp"

namespace nsrl {

/// Finite-support demand pmf, entry x being P(X = x).
using DemandPmf = std::vector<double>;

/// Demand distribution for every (episode m, step h).
class DemandSchedule {
public:
    using Fn = std::function<DemandPmf(int m, int h)>;

    DemandSchedule() = default;
    explicit DemandSchedule(Fn fn) : fn_(std::move(fn)) {}

    static DemandSchedule constant(DemandPmf pmf);
    /// `blocks[i] = (first_episode, pmf)`, sorted by first_episode, first one at 1.
    static DemandSchedule blocks(std::vector<std::pair<int, DemandPmf>> blocks);
    /// Linear interpolation from `start` at m = 1 to `end` at m = M.
    static DemandSchedule interpolate(DemandPmf start, DemandPmf end, int M);

    DemandPmf operator()(int m, int h) const;

private:
    Fn fn_;
};

struct InventoryParams {
    int capacity = 4;  // states 0..capacity-1
    double fixed_cost = 0.0;
    double unit_cost = 0.0;
    double lost_sales_cost = 0.0;
    double holding_cost = 0.0;
    DemandSchedule demand;
    int M = 1;
    int H = 1;
};

/// Affine map raw -> scale * (raw + offset) onto [0,1].
struct PseudoRewardMap {
    double scale = 1.0;
    double offset = 0.0;
    double operator()(double raw) const { return scale * (raw + offset); }
};

/// -f 1[a>0] - c a - q [s+a-Y]^+ + p Y.
double pseudo_reward(const InventoryParams& params, int s, int a, int sales);

/// -C: -(f 1[a>0] + c a + p [X-s-a]^+ + q [s+a-X]^+).
double true_reward(const InventoryParams& params, int s, int a, int demand);

/// Map from the analytic min/max of the raw pseudo-reward over feasible
/// (s, a, Y).
PseudoRewardMap pseudo_reward_map(const InventoryParams& params);

struct CensoredOutcome {
    int sales = 0;  // Y = min(X, s + a)
    double reward = 0.0;  // normalized pseudo-reward
    int next_state = 0;
};

CensoredOutcome censored_step(const InventoryParams& params, const PseudoRewardMap& map, int m,
                              int h, int s, int a, Rng& rng);

enum class InventoryReward { PseudoNormalized, PseudoRaw, TrueRaw };

/// Snapshot of episode m with exact transitions and the requested mean
/// reward. Only PseudoNormalized lies in [0,1].
MdpSnapshot inventory_snapshot(const InventoryParams& params, int m,
                               InventoryReward kind = InventoryReward::PseudoNormalized);

/// Environment over normalized mean pseudo-rewards; sampling routes through
/// censored_step and starts every episode with an empty shelf.
NonstationaryEnv inventory_env(const InventoryParams& params);

void check_inventory(const InventoryParams& params);

}  // namespace nsrl
