#include "nsrl/envs.hpp"

#include <cmath>
#include <utility>

namespace nsrl {

StepOutcome sample_step(const MdpSnapshot& snap, int h, int s, int a, Rng& rng,
                        bool bernoulli_rewards) {
    require(h >= 0 && h < snap.H() && s >= 0 && s < snap.S() && a >= 0 && a < snap.A(),
            "sample_step: index out of range");
    require(snap.valid(h, s, a), "sample_step: masked action");
    StepOutcome out;
    out.next_state = rng.categorical({snap.row(h, s, a), static_cast<std::size_t>(snap.S())});
    const double mean = snap.r(h, s, a);
    out.reward = bernoulli_rewards ? (rng.bernoulli(mean) ? 1.0 : 0.0) : mean;
    return out;
}

NonstationaryEnv::NonstationaryEnv(std::string name, int S, int A, int H, int M,
                                   SnapshotFn snapshots, InitialStateFn initial_state,
                                   SamplerFn sampler)
    : name_(std::move(name)),
      S_(S),
      A_(A),
      H_(H),
      M_(M),
      snapshots_(std::move(snapshots)),
      initial_state_(std::move(initial_state)),
      sampler_(std::move(sampler)) {
    require(S >= 1 && A >= 1 && H >= 1 && M >= 1, "NonstationaryEnv: dimensions must be positive");
    require(static_cast<bool>(snapshots_), "NonstationaryEnv: snapshot provider required");
}

std::shared_ptr<const MdpSnapshot> NonstationaryEnv::snapshot(int m) const {
    require(m >= 1 && m <= M_, "episode index out of range");
    return snapshots_(m);
}

int NonstationaryEnv::initial_state(int m) const {
    return initial_state_ ? initial_state_(m) : 0;
}

StepOutcome NonstationaryEnv::step(const MdpSnapshot& snap, int m, int h, int s, int a,
                                   Rng& rng) const {
    if (sampler_) return sampler_(snap, m, h, s, a, rng);
    return sample_step(snap, h, s, a, rng, bernoulli_rewards);
}

// ---------------------------------------------------------------------------

namespace {

void check_lock(const LockConfig& cfg) {
    require(cfg.H >= 2, "lock: H must be at least 2");
    require(cfg.M >= 1 && cfg.A >= 1, "lock: M and A must be positive");
    require(cfg.success_prob > 0.0 && cfg.success_prob <= 1.0, "lock: success_prob must be in (0,1]");
    const double sink = cfg.sink_reward < 0.0 ? 1.0 / (8.0 * cfg.H) : cfg.sink_reward;
    require(sink >= 0.0 && cfg.bad_reward >= 0.0 && sink <= cfg.good_reward &&
                cfg.bad_reward <= cfg.good_reward && cfg.good_reward <= 1.0,
            "lock: rewards must satisfy 0 <= sink, bad <= good <= 1");
    if (cfg.variation == LockVariation::Abrupt)
        require(cfg.period >= 1 && cfg.period <= cfg.M, "lock: abrupt period must lie in [1, M]");
}

MdpSnapshot lock_snapshot(const LockConfig& cfg, const std::vector<std::vector<int>>& correct,
                          double routing, bool swapped) {
    const LockLayout L{cfg.H};
    const int S = L.states();
    const int H = cfg.H;
    const int A = cfg.A;
    const double sink_r = cfg.sink_reward < 0.0 ? 1.0 / (8.0 * H) : cfg.sink_reward;
    MdpSnapshot snap(H, S, A);

    // Unreachable (state, step) pairs fall into the sink with no reward.
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) snap.p(h, s, a, L.sink()) = 1.0;

    auto reset_row = [&](int h, int s, int a) {
        double* rw = snap.row(h, s, a);
        for (int k = 0; k < S; ++k) rw[k] = 0.0;
    };

    for (int a = 0; a < A; ++a) {
        const int own = a % 2;
        reset_row(0, L.start(), a);
        snap.p(0, L.start(), a, L.path_state(own, 1)) += routing;
        snap.p(0, L.start(), a, L.path_state(1 - own, 1)) += 1.0 - routing;
    }

    for (int path = 0; path < 2; ++path) {
        for (int depth = 1; depth <= H - 2; ++depth) {
            const int s = L.path_state(path, depth);
            for (int a = 0; a < A; ++a) {
                reset_row(depth, s, a);
                if (a == correct[path][depth]) {
                    snap.p(depth, s, a, L.path_state(path, depth + 1)) = cfg.success_prob;
                    snap.p(depth, s, a, L.sink()) += 1.0 - cfg.success_prob;
                    snap.r(depth, s, a) = 0.0;
                } else {
                    snap.p(depth, s, a, L.sink()) = 1.0;
                    snap.r(depth, s, a) = sink_r;
                }
            }
        }
        const int end = L.path_state(path, H - 1);
        const bool good = (path == 0) != swapped;
        for (int a = 0; a < A; ++a) {
            reset_row(H - 1, end, a);
            snap.p(H - 1, end, a, end) = 1.0;
            snap.r(H - 1, end, a) = good ? cfg.good_reward : cfg.bad_reward;
        }
    }

    for (int h = 0; h < H; ++h)
        for (int a = 0; a < A; ++a) snap.r(h, L.sink(), a) = sink_r;

    snap.normalize_rows();
    return snap;
}

}  // namespace

std::vector<std::vector<int>> lock_correct_actions(const LockConfig& cfg) {
    check_lock(cfg);
    Rng rng(cfg.seed, 0x10c4);
    std::vector<std::vector<int>> correct(2, std::vector<int>(cfg.H, -1));
    for (int path = 0; path < 2; ++path)
        for (int depth = 1; depth <= cfg.H - 2; ++depth)
            correct[path][depth] = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.A)));
    return correct;
}

double lock_routing_prob(const LockConfig& cfg, int m) {
    if (cfg.variation != LockVariation::Gradual || cfg.M == 1) return cfg.success_prob;
    const double t = static_cast<double>(m - 1) / static_cast<double>(cfg.M - 1);
    return cfg.success_prob - (2.0 * cfg.success_prob - 1.0) * t;
}

NonstationaryEnv build_lock(const LockConfig& cfg) {
    check_lock(cfg);
    const auto correct = lock_correct_actions(cfg);
    const LockLayout layout{cfg.H};
    const char* kind = cfg.variation == LockVariation::Abrupt    ? "lock-abrupt"
                       : cfg.variation == LockVariation::Gradual ? "lock-gradual"
                                                                 : "lock";
    NonstationaryEnv::SnapshotFn provider;
    if (cfg.variation == LockVariation::Gradual) {
        provider = [cfg, correct](int m) {
            return std::make_shared<const MdpSnapshot>(
                lock_snapshot(cfg, correct, lock_routing_prob(cfg, m), false));
        };
    } else {
        auto plain = std::make_shared<const MdpSnapshot>(
            lock_snapshot(cfg, correct, cfg.success_prob, false));
        auto swapped = std::make_shared<const MdpSnapshot>(
            lock_snapshot(cfg, correct, cfg.success_prob, true));
        const bool abrupt = cfg.variation == LockVariation::Abrupt;
        const int period = cfg.period;
        provider = [plain, swapped, abrupt, period](int m) {
            if (abrupt && ((m - 1) / period) % 2 == 1) return swapped;
            return plain;
        };
    }
    return NonstationaryEnv(kind, layout.states(), cfg.A, cfg.H, cfg.M, std::move(provider),
                            [](int) { return 0; });
}

// ---------------------------------------------------------------------------

std::vector<int> jao_good_actions(const JaoChainConfig& cfg) {
    require(cfg.segment_length >= 1, "jao: segment_length must be positive");
    const int segments = (cfg.M + cfg.segment_length - 1) / cfg.segment_length;
    Rng rng(cfg.seed, 0x7a0);
    std::vector<int> good(static_cast<std::size_t>(segments));
    for (auto& g : good) g = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.A)));
    return good;
}

double jao_optimal_average_reward(double delta, double epsilon) {
    return (delta + epsilon) / (2.0 * delta + epsilon);
}

NonstationaryEnv build_jao_chain(const JaoChainConfig& cfg) {
    require(cfg.S == 2, "jao: only the two-state block is supported");
    require(cfg.A >= 1 && cfg.H >= 1 && cfg.M >= 1, "jao: A, H, M must be positive");
    require(cfg.epsilon >= 0.0 && cfg.epsilon < cfg.delta, "jao: require 0 <= epsilon < delta");
    require(cfg.delta <= 0.5 && cfg.delta + cfg.epsilon <= 1.0, "jao: require delta <= 1/2");
    const auto good = jao_good_actions(cfg);

    std::vector<std::shared_ptr<const MdpSnapshot>> by_action(static_cast<std::size_t>(cfg.A));
    for (int star = 0; star < cfg.A; ++star) {
        MdpSnapshot snap(cfg.H, 2, cfg.A);
        for (int h = 0; h < cfg.H; ++h)
            for (int a = 0; a < cfg.A; ++a) {
                const double up = cfg.delta + (a == star ? cfg.epsilon : 0.0);
                snap.p(h, kJaoLow, a, kJaoHigh) = up;
                snap.p(h, kJaoLow, a, kJaoLow) = 1.0 - up;
                snap.p(h, kJaoHigh, a, kJaoLow) = cfg.delta;
                snap.p(h, kJaoHigh, a, kJaoHigh) = 1.0 - cfg.delta;
                snap.r(h, kJaoLow, a) = 0.0;
                snap.r(h, kJaoHigh, a) = 1.0;
            }
        snap.normalize_rows();
        by_action[static_cast<std::size_t>(star)] = std::make_shared<const MdpSnapshot>(std::move(snap));
    }
    const int L = cfg.segment_length;
    return NonstationaryEnv(
        "jao-chain", 2, cfg.A, cfg.H, cfg.M,
        [by_action, good, L](int m) { return by_action[static_cast<std::size_t>(good[(m - 1) / L])]; },
        [](int) { return kJaoLow; });
}

}  // namespace nsrl
