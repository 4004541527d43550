#include "nsrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsrl {

ValueTables optimal_values(const MdpSnapshot& snap) {
    const int H = snap.H(), S = snap.S(), A = snap.A();
    ValueTables out;
    out.H = H;
    out.S = S;
    out.A = A;
    out.V.assign(static_cast<std::size_t>(H + 1) * S, 0.0);
    out.Q.assign(static_cast<std::size_t>(H) * S * A, -std::numeric_limits<double>::infinity());
    for (int h = H - 1; h >= 0; --h) {
        const double* next = out.V.data() + static_cast<std::size_t>(h + 1) * S;
        for (int s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) {
                if (!snap.valid(h, s, a)) continue;
                const double* rw = snap.row(h, s, a);
                double q = snap.r(h, s, a);
                for (int k = 0; k < S; ++k) q += rw[k] * next[k];
                out.Q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
                best = std::max(best, q);
            }
            out.V[static_cast<std::size_t>(h) * S + s] = best;
        }
    }
    return out;
}

TabularPolicy greedy_policy(const MdpSnapshot& snap, const ValueTables& values) {
    TabularPolicy pi(snap.H(), snap.S());
    for (int h = 0; h < snap.H(); ++h)
        for (int s = 0; s < snap.S(); ++s) {
            int best = -1;
            for (int a = 0; a < snap.A(); ++a) {
                if (!snap.valid(h, s, a)) continue;
                if (best < 0 || values.q(h, s, a) > values.q(h, s, best)) best = a;
            }
            pi.at(h, s) = best;
        }
    return pi;
}

std::vector<double> policy_value(const MdpSnapshot& snap, const TabularPolicy& policy) {
    check_policy(snap, policy);
    const int H = snap.H(), S = snap.S();
    std::vector<double> V(static_cast<std::size_t>(H + 1) * S, 0.0);
    for (int h = H - 1; h >= 0; --h) {
        const double* next = V.data() + static_cast<std::size_t>(h + 1) * S;
        for (int s = 0; s < S; ++s) {
            const int a = policy.at(h, s);
            const double* rw = snap.row(h, s, a);
            double v = snap.r(h, s, a);
            for (int k = 0; k < S; ++k) v += rw[k] * next[k];
            V[static_cast<std::size_t>(h) * S + s] = v;
        }
    }
    return V;
}

double episode_regret(const MdpSnapshot& snap, const TabularPolicy& policy, int initial_state) {
    const double best = optimal_values(snap).v(0, initial_state);
    const double got = policy_value(snap, policy)[static_cast<std::size_t>(initial_state)];
    return best - got;
}

RegretSeries dynamic_regret(const NonstationaryEnv& env, const std::vector<TabularPolicy>& policies,
                            const std::vector<int>& initial_states, int first_episode) {
    require(policies.size() == initial_states.size(),
            "dynamic_regret: one initial state per policy required");
    require(first_episode >= 1 &&
                first_episode - 1 + static_cast<long>(policies.size()) <= env.M(),
            "dynamic_regret: episode range exceeds M");
    RegretSeries out;
    out.per_episode.reserve(policies.size());
    out.cumulative.reserve(policies.size());
    std::shared_ptr<const MdpSnapshot> cached;
    ValueTables star;
    double acc = 0.0;
    for (std::size_t i = 0; i < policies.size(); ++i) {
        auto snap = env.snapshot(first_episode + static_cast<int>(i));
        if (snap != cached) {
            star = optimal_values(*snap);
            cached = snap;
        }
        const int s1 = initial_states[i];
        const double got = policy_value(*snap, policies[i])[static_cast<std::size_t>(s1)];
        const double gap = std::max(0.0, star.v(0, s1) - got);
        acc += gap;
        out.per_episode.push_back(gap);
        out.cumulative.push_back(acc);
    }
    return out;
}

std::pair<double, double> snapshot_step_distance(const MdpSnapshot& x, const MdpSnapshot& y, int h) {
    require(x.S() == y.S() && x.A() == y.A() && x.H() == y.H(), "snapshot shapes differ");
    double dr = 0.0, dp = 0.0;
    for (int s = 0; s < x.S(); ++s)
        for (int a = 0; a < x.A(); ++a) {
            if (!x.valid(h, s, a) || !y.valid(h, s, a)) continue;
            dr = std::max(dr, std::abs(x.r(h, s, a) - y.r(h, s, a)));
            const double* rx = x.row(h, s, a);
            const double* ry = y.row(h, s, a);
            double l1 = 0.0;
            for (int k = 0; k < x.S(); ++k) l1 += std::abs(rx[k] - ry[k]);
            dp = std::max(dp, l1);
        }
    return {dr, dp};
}

BudgetReport variation_budgets(const NonstationaryEnv& env, int first, int last,
                               const EpochPlan* plan) {
    require(first >= 1 && last <= env.M() && first <= last, "variation_budgets: bad episode range");
    const int H = env.H();
    BudgetReport rep;
    rep.per_step_r.assign(static_cast<std::size_t>(H), 0.0);
    rep.per_step_p.assign(static_cast<std::size_t>(H), 0.0);
    if (plan) {
        require(plan->M() == env.M(), "variation_budgets: plan does not match env");
        for (int d = 0; d < plan->epochs(); ++d) {
            const int lo = std::max(first, plan->first(d));
            const int hi = std::min(last, plan->last(d));
            if (lo <= hi) rep.locals.push_back({lo, hi, 0.0, 0.0});
        }
    }

    std::size_t local = 0;
    auto prev = env.snapshot(first);
    for (int m = first; m < last; ++m) {
        auto next = env.snapshot(m + 1);
        double pair_r = 0.0, pair_p = 0.0;
        if (next != prev) {
            for (int h = 0; h < H; ++h) {
                const auto [dr, dp] = snapshot_step_distance(*prev, *next, h);
                rep.per_step_r[static_cast<std::size_t>(h)] += dr;
                rep.per_step_p[static_cast<std::size_t>(h)] += dp;
                pair_r += dr;
                pair_p += dp;
            }
        }
        rep.delta_r += pair_r;
        rep.delta_p += pair_p;
        if (!rep.locals.empty()) {
            while (local < rep.locals.size() && rep.locals[local].last < m) ++local;
            if (local < rep.locals.size() && rep.locals[local].first <= m &&
                m + 1 <= rep.locals[local].last) {
                rep.locals[local].delta_r += pair_r;
                rep.locals[local].delta_p += pair_p;
            }
        }
        prev = std::move(next);
    }
    return rep;
}

}  // namespace nsrl
