#include "nsrl/model.hpp"

#include <cmath>
#include <numeric>

namespace nsrl {

MdpSnapshot::MdpSnapshot(int H, int S, int A) : H_(H), S_(S), A_(A) {
    require(H >= 1 && S >= 1 && A >= 1, "MdpSnapshot: dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(H) * S * A;
    P_.assign(n * S, 0.0);
    R_.assign(n, 0.0);
    mask_.assign(n, 1);
}

void MdpSnapshot::normalize_rows() {
    for (int h = 0; h < H_; ++h)
        for (int s = 0; s < S_; ++s)
            for (int a = 0; a < A_; ++a) {
                if (!valid(h, s, a)) continue;
                double* rw = row(h, s, a);
                const double total = std::accumulate(rw, rw + S_, 0.0);
                if (total > 0.0)
                    for (int k = 0; k < S_; ++k) rw[k] /= total;
            }
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::RowSum: return "row-sum";
        case ViolationKind::NegativeProbability: return "negative-probability";
        case ViolationKind::RewardRange: return "reward-range";
        case ViolationKind::NoValidAction: return "no-valid-action";
        case ViolationKind::Shape: return "shape";
    }
    return "unknown";
}

ValidationReport validate_snapshot(const MdpSnapshot& snap) {
    ValidationReport report;
    if (snap.H() < 1 || snap.S() < 1 || snap.A() < 1) {
        report.push_back({0, 0, -1, ViolationKind::Shape, 0.0});
        return report;
    }
    for (int h = 0; h < snap.H(); ++h) {
        for (int s = 0; s < snap.S(); ++s) {
            bool any_valid = false;
            for (int a = 0; a < snap.A(); ++a) {
                if (!snap.valid(h, s, a)) continue;
                any_valid = true;
                const double* rw = snap.row(h, s, a);
                double total = 0.0;
                for (int k = 0; k < snap.S(); ++k) {
                    if (rw[k] < 0.0)
                        report.push_back({h, s, a, ViolationKind::NegativeProbability, rw[k]});
                    total += rw[k];
                }
                if (!(std::abs(total - 1.0) <= kRowSumTolerance))
                    report.push_back({h, s, a, ViolationKind::RowSum, total});
                const double rew = snap.r(h, s, a);
                if (!(rew >= 0.0 && rew <= 1.0))
                    report.push_back({h, s, a, ViolationKind::RewardRange, rew});
            }
            if (!any_valid) report.push_back({h, s, -1, ViolationKind::NoValidAction, 0.0});
        }
    }
    return report;
}

void check_policy(const MdpSnapshot& snap, const TabularPolicy& policy) {
    require(policy.H == snap.H() && policy.S == snap.S(), "policy shape does not match snapshot");
    for (int h = 0; h < snap.H(); ++h)
        for (int s = 0; s < snap.S(); ++s) {
            const int a = policy.at(h, s);
            require(a >= 0 && a < snap.A() && snap.valid(h, s, a), "policy selects a masked action");
        }
}

EpisodeRecord& RunTrace::append(EpisodeRecord rec) {
    require(episodes.empty() || rec.episode == episodes.back().episode + 1,
            "RunTrace: episode indices must be contiguous");
    const double prev = episodes.empty() ? 0.0 : episodes.back().cumulative_reward;
    rec.cumulative_reward = prev + rec.reward;
    episodes.push_back(std::move(rec));
    return episodes.back();
}

}  // namespace nsrl
