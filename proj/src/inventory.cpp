#include "nsrl/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nsrl {

DemandSchedule DemandSchedule::constant(DemandPmf pmf) {
    return DemandSchedule([pmf = std::move(pmf)](int, int) { return pmf; });
}

DemandSchedule DemandSchedule::blocks(std::vector<std::pair<int, DemandPmf>> blocks) {
    require(!blocks.empty() && blocks.front().first == 1, "demand blocks must start at episode 1");
    require(std::is_sorted(blocks.begin(), blocks.end(),
                           [](const auto& x, const auto& y) { return x.first < y.first; }),
            "demand blocks must be sorted");
    return DemandSchedule([blocks = std::move(blocks)](int m, int) {
        auto it = std::upper_bound(blocks.begin(), blocks.end(), m,
                                   [](int v, const auto& b) { return v < b.first; });
        return std::prev(it)->second;
    });
}

DemandSchedule DemandSchedule::interpolate(DemandPmf start, DemandPmf end, int M) {
    const std::size_t n = std::max(start.size(), end.size());
    start.resize(n, 0.0);
    end.resize(n, 0.0);
    return DemandSchedule([start = std::move(start), end = std::move(end), M](int m, int) {
        const double t = M > 1 ? static_cast<double>(m - 1) / (M - 1) : 0.0;
        DemandPmf out(start.size());
        for (std::size_t x = 0; x < out.size(); ++x) out[x] = (1.0 - t) * start[x] + t * end[x];
        return out;
    });
}

DemandPmf DemandSchedule::operator()(int m, int h) const {
    require(static_cast<bool>(fn_), "demand schedule is empty");
    return fn_(m, h);
}

void check_inventory(const InventoryParams& params) {
    require(params.capacity >= 1, "inventory: capacity must be positive");
    require(params.fixed_cost >= 0 && params.unit_cost >= 0 && params.lost_sales_cost >= 0 &&
                params.holding_cost >= 0,
            "inventory: costs must be non-negative");
    require(params.M >= 1 && params.H >= 1, "inventory: M and H must be positive");
}

namespace {

void check_action(const InventoryParams& params, int s, int a) {
    require(s >= 0 && s < params.capacity, "inventory: state out of range");
    require(a >= 0 && a <= params.capacity - 1 - s, "inventory: order exceeds capacity");
}

DemandPmf checked_pmf(const InventoryParams& params, int m, int h) {
    DemandPmf pmf = params.demand(m, h);
    require(!pmf.empty(), "inventory: empty demand pmf");
    double total = 0.0;
    for (double x : pmf) {
        require(x >= 0.0, "inventory: negative demand probability");
        total += x;
    }
    require(std::abs(total - 1.0) <= 1e-9, "inventory: demand pmf must sum to 1");
    return pmf;
}

}  // namespace

double pseudo_reward(const InventoryParams& params, int s, int a, int sales) {
    check_action(params, s, a);
    require(sales >= 0 && sales <= s + a, "inventory: sales exceed stock");
    return -params.fixed_cost * (a > 0 ? 1.0 : 0.0) - params.unit_cost * a -
           params.holding_cost * (s + a - sales) + params.lost_sales_cost * sales;
}

double true_reward(const InventoryParams& params, int s, int a, int demand) {
    check_action(params, s, a);
    require(demand >= 0, "inventory: negative demand");
    const int stock = s + a;
    return -(params.fixed_cost * (a > 0 ? 1.0 : 0.0) + params.unit_cost * a +
             params.lost_sales_cost * std::max(0, demand - stock) +
             params.holding_cost * std::max(0, stock - demand));
}

PseudoRewardMap pseudo_reward_map(const InventoryParams& params) {
    check_inventory(params);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int s = 0; s < params.capacity; ++s)
        for (int a = 0; a <= params.capacity - 1 - s; ++a)
            for (int y = 0; y <= s + a; ++y) {
                const double v = pseudo_reward(params, s, a, y);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    PseudoRewardMap map;
    map.offset = -lo;
    map.scale = hi > lo ? 1.0 / (hi - lo) : 1.0;
    return map;
}

CensoredOutcome censored_step(const InventoryParams& params, const PseudoRewardMap& map, int m,
                              int h, int s, int a, Rng& rng) {
    check_action(params, s, a);
    const DemandPmf pmf = checked_pmf(params, m, h);
    const int demand = rng.categorical(pmf);
    const int stock = s + a;
    CensoredOutcome out;
    out.sales = std::min(demand, stock);
    out.next_state = std::max(0, stock - demand);
    out.reward = map(pseudo_reward(params, s, a, out.sales));
    return out;
}

MdpSnapshot inventory_snapshot(const InventoryParams& params, int m, InventoryReward kind) {
    check_inventory(params);
    const int S = params.capacity;
    const PseudoRewardMap map = pseudo_reward_map(params);
    MdpSnapshot snap(params.H, S, S);
    for (int h = 0; h < params.H; ++h) {
        const DemandPmf pmf = checked_pmf(params, m, h);
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < S; ++a) {
                if (a > S - 1 - s) {
                    snap.set_valid(h, s, a, false);
                    continue;
                }
                const int stock = s + a;
                double mean = 0.0;
                for (std::size_t x = 0; x < pmf.size(); ++x) {
                    if (pmf[x] == 0.0) continue;
                    const int demand = static_cast<int>(x);
                    const int sales = std::min(demand, stock);
                    snap.p(h, s, a, stock - sales) += pmf[x];
                    double rew = 0.0;
                    switch (kind) {
                        case InventoryReward::PseudoNormalized:
                            rew = map(pseudo_reward(params, s, a, sales));
                            break;
                        case InventoryReward::PseudoRaw:
                            rew = pseudo_reward(params, s, a, sales);
                            break;
                        case InventoryReward::TrueRaw:
                            rew = true_reward(params, s, a, demand);
                            break;
                    }
                    mean += pmf[x] * rew;
                }
                snap.r(h, s, a) = mean;
            }
        }
    }
    snap.normalize_rows();
    return snap;
}

NonstationaryEnv inventory_env(const InventoryParams& params) {
    check_inventory(params);
    const PseudoRewardMap map = pseudo_reward_map(params);
    return NonstationaryEnv(
        "inventory", params.capacity, params.capacity, params.H, params.M,
        [params](int m) { return std::make_shared<const MdpSnapshot>(inventory_snapshot(params, m)); },
        [](int) { return 0; },
        [params, map](const MdpSnapshot&, int m, int h, int s, int a, Rng& rng) {
            const CensoredOutcome c = censored_step(params, map, m, h, s, a, rng);
            return StepOutcome{c.reward, c.next_state, c.sales};
        });
}

}  // namespace nsrl
