#include "nsrl/multiagent.hpp"

#include <cmath>
#include <limits>

namespace nsrl {

TeamModel::TeamModel(int H, int S, int A1, int A2) : H_(H), S_(S), A1_(A1), A2_(A2) {
    require(H >= 1 && S >= 1 && A1 >= 1 && A2 >= 1, "TeamModel: dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(H) * S * A1 * A2;
    r_.assign(n, 0.0);
    P_.assign(n * S, 0.0);
}

bool TeamModel::valid() const {
    for (int h = 0; h < H_; ++h)
        for (int s = 0; s < S_; ++s)
            for (int a1 = 0; a1 < A1_; ++a1)
                for (int a2 = 0; a2 < A2_; ++a2) {
                    const double rew = r(h, s, a1, a2);
                    if (!(rew >= 0.0 && rew <= 1.0)) return false;
                    double total = 0.0;
                    const double* rw = row(h, s, a1, a2);
                    for (int k = 0; k < S_; ++k) {
                        if (rw[k] < 0.0) return false;
                        total += rw[k];
                    }
                    if (std::abs(total - 1.0) > kRowSumTolerance) return false;
                }
    return true;
}

TeamModel TeamModel::random(int H, int S, int A1, int A2, Rng& rng) {
    TeamModel team(H, S, A1, A2);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a1 = 0; a1 < A1; ++a1)
                for (int a2 = 0; a2 < A2; ++a2) {
                    team.r(h, s, a1, a2) = rng.uniform();
                    double total = 0.0;
                    for (int k = 0; k < S; ++k) total += (team.p(h, s, a1, a2, k) = rng.uniform() + 1e-3);
                    for (int k = 0; k < S; ++k) team.p(h, s, a1, a2, k) /= total;
                }
    return team;
}

int policy_switches(const TabularPolicy& x, const TabularPolicy& y) {
    require(x.H == y.H && x.S == y.S, "policy_switches: shapes differ");
    int n = 0;
    for (std::size_t i = 0; i < x.actions.size(); ++i) n += x.actions[i] != y.actions[i] ? 1 : 0;
    return n;
}

std::int64_t switching_cost(const OpponentSchedule& schedule) {
    std::int64_t total = 0;
    for (std::size_t m = 1; m < schedule.policies.size(); ++m)
        total += policy_switches(schedule.policies[m - 1], schedule.policies[m]);
    return total;
}

OpponentSchedule periodic_opponent(const TeamModel& team, int M, int period,
                                   const TabularPolicy& initial, Rng& rng) {
    require(M >= 1 && period >= 1, "periodic_opponent: M and period must be positive");
    require(initial.H == team.H() && initial.S == team.S(), "periodic_opponent: shape mismatch");
    OpponentSchedule sched;
    TabularPolicy cur = initial;
    for (int m = 1; m <= M; ++m) {
        if (m > 1 && (m - 1) % period == 0 && team.A2() > 1) {
            const int h = static_cast<int>(rng.below(static_cast<std::uint64_t>(team.H())));
            const int s = static_cast<int>(rng.below(static_cast<std::uint64_t>(team.S())));
            const int shift = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(team.A2() - 1)));
            cur.at(h, s) = (cur.at(h, s) + shift) % team.A2();
        }
        sched.policies.push_back(cur);
    }
    return sched;
}

namespace {

MdpSnapshot marginal_snapshot(const TeamModel& team, const TabularPolicy& opponent) {
    MdpSnapshot snap(team.H(), team.S(), team.A1());
    for (int h = 0; h < team.H(); ++h)
        for (int s = 0; s < team.S(); ++s) {
            const int a2 = opponent.at(h, s);
            for (int a1 = 0; a1 < team.A1(); ++a1) {
                snap.r(h, s, a1) = team.r(h, s, a1, a2);
                const double* rw = team.row(h, s, a1, a2);
                for (int k = 0; k < team.S(); ++k) snap.p(h, s, a1, k) = rw[k];
            }
        }
    snap.normalize_rows();
    return snap;
}

TabularPolicy decode_policy(std::int64_t index, int H, int S, int A) {
    TabularPolicy pi(H, S);
    for (auto& a : pi.actions) {
        a = static_cast<int>(index % A);
        index /= A;
    }
    return pi;
}

}  // namespace

NonstationaryEnv wrap_team(const TeamModel& team, const OpponentSchedule& schedule) {
    require(!schedule.policies.empty(), "wrap_team: empty schedule");
    std::vector<std::shared_ptr<const MdpSnapshot>> snaps;
    snaps.reserve(schedule.policies.size());
    for (std::size_t m = 0; m < schedule.policies.size(); ++m) {
        const auto& pi = schedule.policies[m];
        require(pi.H == team.H() && pi.S == team.S(), "wrap_team: schedule shape mismatch");
        for (int a : pi.actions) require(a >= 0 && a < team.A2(), "wrap_team: invalid opponent action");
        if (m > 0 && pi == schedule.policies[m - 1])
            snaps.push_back(snaps.back());
        else
            snaps.push_back(std::make_shared<const MdpSnapshot>(marginal_snapshot(team, pi)));
    }
    const int M = static_cast<int>(snaps.size());
    return NonstationaryEnv("team", team.S(), team.A1(), team.H(), M,
                            [snaps = std::move(snaps)](int m) { return snaps[static_cast<std::size_t>(m - 1)]; },
                            [](int) { return 0; });
}

std::vector<double> joint_value(const TeamModel& team, const TabularPolicy& pi1,
                                const TabularPolicy& pi2) {
    const int H = team.H(), S = team.S();
    std::vector<double> V(static_cast<std::size_t>(H + 1) * S, 0.0);
    for (int h = H - 1; h >= 0; --h) {
        const double* next = V.data() + static_cast<std::size_t>(h + 1) * S;
        for (int s = 0; s < S; ++s) {
            const int a1 = pi1.at(h, s), a2 = pi2.at(h, s);
            const double* rw = team.row(h, s, a1, a2);
            double v = team.r(h, s, a1, a2);
            for (int k = 0; k < S; ++k) v += rw[k] * next[k];
            V[static_cast<std::size_t>(h) * S + s] = v;
        }
    }
    return V;
}

SmoothnessResult verify_smoothness(const TeamModel& team, double lambda, double mu) {
    const int H = team.H(), S = team.S();
    const double cells = static_cast<double>(H) * S;
    const double n1d = std::pow(static_cast<double>(team.A1()), cells);
    const double n2d = std::pow(static_cast<double>(team.A2()), cells);
    if (!(n1d * n2d <= kMaxPolicyPairs))
        throw ContractViolation("verify_smoothness: policy enumeration exceeds 1e6 pairs");
    const auto n1 = static_cast<std::int64_t>(n1d);
    const auto n2 = static_cast<std::int64_t>(n2d);
    const std::size_t hs = static_cast<std::size_t>(H) * S;
    constexpr double tol = 1e-12;

    std::vector<TabularPolicy> p1, p2;
    for (std::int64_t i = 0; i < n1; ++i) p1.push_back(decode_policy(i, H, S, team.A1()));
    for (std::int64_t i = 0; i < n2; ++i) p2.push_back(decode_policy(i, H, S, team.A2()));

    // Pointwise best joint value, and per opponent policy the extreme values
    // over agent 1's policies (min when mu >= 0, max otherwise).
    std::vector<double> best(hs, -std::numeric_limits<double>::infinity());
    std::vector<double> extreme(static_cast<std::size_t>(n2) * hs,
                                mu >= 0.0 ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity());
    std::vector<std::int64_t> extreme_arg(static_cast<std::size_t>(n2) * hs, 0);
    std::vector<double> all(static_cast<std::size_t>(n1 * n2) * hs);
    SmoothnessResult res;
    for (std::int64_t i1 = 0; i1 < n1; ++i1)
        for (std::int64_t i2 = 0; i2 < n2; ++i2) {
            const auto V = joint_value(team, p1[static_cast<std::size_t>(i1)], p2[static_cast<std::size_t>(i2)]);
            double* dst = all.data() + static_cast<std::size_t>(i1 * n2 + i2) * hs;
            for (std::size_t c = 0; c < hs; ++c) {
                dst[c] = V[c];
                best[c] = std::max(best[c], V[c]);
                const std::size_t e = static_cast<std::size_t>(i2) * hs + c;
                const bool better = mu >= 0.0 ? V[c] < extreme[e] : V[c] > extreme[e];
                if (better) {
                    extreme[e] = V[c];
                    extreme_arg[e] = i1;
                }
            }
            ++res.pairs_checked;
        }

    std::optional<SmoothnessWitness> first_failure;
    for (std::int64_t c1 = 0; c1 < n1; ++c1)
        for (std::int64_t c2 = 0; c2 < n2; ++c2) {
            const double* star = all.data() + static_cast<std::size_t>(c1 * n2 + c2) * hs;
            bool optimal = true;
            for (std::size_t c = 0; c < hs && optimal; ++c) optimal = star[c] >= best[c] - tol;
            if (!optimal) continue;
            std::optional<SmoothnessWitness> fail;
            for (std::int64_t i2 = 0; i2 < n2 && !fail; ++i2) {
                const double* dev = all.data() + static_cast<std::size_t>(c1 * n2 + i2) * hs;
                for (std::size_t c = 0; c < hs; ++c) {
                    const std::size_t e = static_cast<std::size_t>(i2) * hs + c;
                    const double rhs = lambda * star[c] - mu * extreme[e];
                    if (dev[c] < rhs - tol) {
                        fail = SmoothnessWitness{p1[static_cast<std::size_t>(c1)],
                                                 p2[static_cast<std::size_t>(c2)],
                                                 p1[static_cast<std::size_t>(extreme_arg[e])],
                                                 p2[static_cast<std::size_t>(i2)],
                                                 static_cast<int>(c / S),
                                                 static_cast<int>(c % S),
                                                 false,
                                                 dev[c],
                                                 rhs};
                        break;
                    }
                }
            }
            if (!fail) {
                res.smooth = true;
                res.pi1_star = p1[static_cast<std::size_t>(c1)];
                res.pi2_star = p2[static_cast<std::size_t>(c2)];
                return res;
            }
            if (!first_failure) first_failure = std::move(fail);
        }
    res.witness = std::move(first_failure);
    return res;
}

}  // namespace nsrl
