#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsrl/model.hpp"
#include "nsrl/rng.hpp"

namespace nsrl {

struct StepOutcome {
    double reward = 0.0;
    int next_state = 0;
    int sales = -1;  // censored demand, inventory only
};

/// Draws s' ~ P[h][s][a][.] and returns the stored mean reward, or a
/// Bernoulli draw with that mean when `bernoulli_rewards` is set.
StepOutcome sample_step(const MdpSnapshot& snap, int h, int s, int a, Rng& rng,
                        bool bernoulli_rewards = false);

/// Episode-indexed family of snapshots plus the sampling interface agents
/// interact through. All callbacks are pure in the episode index.
class NonstationaryEnv {
public:
    using SnapshotFn = std::function<std::shared_ptr<const MdpSnapshot>(int m)>;
    using InitialStateFn = std::function<int(int m)>;
    using SamplerFn =
        std::function<StepOutcome(const MdpSnapshot& snap, int m, int h, int s, int a, Rng& rng)>;

    NonstationaryEnv(std::string name, int S, int A, int H, int M, SnapshotFn snapshots,
                     InitialStateFn initial_state = {}, SamplerFn sampler = {});

    const std::string& name() const { return name_; }
    int S() const { return S_; }
    int A() const { return A_; }
    int H() const { return H_; }
    int M() const { return M_; }
    std::int64_t T() const { return static_cast<std::int64_t>(M_) * H_; }

    std::shared_ptr<const MdpSnapshot> snapshot(int m) const;
    int initial_state(int m) const;

    /// One environment step in episode m. `snap` must be snapshot(m).
    StepOutcome step(const MdpSnapshot& snap, int m, int h, int s, int a, Rng& rng) const;

    bool bernoulli_rewards = false;

private:
    std::string name_;
    int S_, A_, H_, M_;
    SnapshotFn snapshots_;
    InitialStateFn initial_state_;
    SamplerFn sampler_;
};

// ---------------------------------------------------------------------------
// Bidirectional diabolical combination lock.

enum class LockVariation { None, Abrupt, Gradual };

struct LockConfig {
    int M = 5000;
    int H = 5;
    int A = 2;
    double success_prob = 0.98;
    double sink_reward = -1.0;  // negative selects 1/(8H)
    double good_reward = 1.0;
    double bad_reward = 0.25;
    LockVariation variation = LockVariation::Abrupt;
    int period = 1000;
    std::uint64_t seed = 0;
};

/// State layout: 0 is the start state, path k in {0,1} at depth d in
/// [1, H-1] is 1 + k(H-1) + (d-1), and S-1 is the sink.
struct LockLayout {
    int H;
    int start() const { return 0; }
    int path_state(int path, int depth) const { return 1 + path * (H - 1) + (depth - 1); }
    int sink() const { return 2 * (H - 1) + 1; }
    int states() const { return 2 * (H - 1) + 2; }
};

/// Probability that an action reaches its own path from the start state in
/// episode m. Constant unless the variation is gradual.
double lock_routing_prob(const LockConfig& cfg, int m);

NonstationaryEnv build_lock(const LockConfig& cfg);

/// Correct action per (path, depth) for a lock built from `cfg`; depth 0 and
/// the endpoint depth have no correct action and hold -1.
std::vector<std::vector<int>> lock_correct_actions(const LockConfig& cfg);

// ---------------------------------------------------------------------------
// Chain of H two-state JAO blocks.

struct JaoChainConfig {
    int S = 2;  // only the two-state block is built
    int A = 2;
    int H = 5;
    int M = 1000;
    double delta = 0.2;
    double epsilon = 0.1;
    int segment_length = 250;
    std::uint64_t seed = 0;
};

inline constexpr int kJaoLow = 0;   // reward 0
inline constexpr int kJaoHigh = 1;  // reward 1

/// Good action of every segment, in segment order.
std::vector<int> jao_good_actions(const JaoChainConfig& cfg);

/// Long-run average reward of a single JAO block under the good action.
double jao_optimal_average_reward(double delta, double epsilon);

NonstationaryEnv build_jao_chain(const JaoChainConfig& cfg);

}  // namespace nsrl
