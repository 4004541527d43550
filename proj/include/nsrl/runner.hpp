#pragma once

#include <functional>

#include "nsrl/agents.hpp"
#include "nsrl/envs.hpp"
#include "nsrl/model.hpp"
#include "nsrl/schedule.hpp"

namespace nsrl {

struct RunOptions {
    bool record_policy = false;
    bool record_steps = false;  // per-step sales / next-state audit columns
    /// Called before the first step of episode m, after any restart.
    std::function<void(int m, const Agent& agent)> on_episode_start;
};

/// Plays one episode of `env` with `agent`; returns the realized reward sum.
/// The caller owns restarts.
EpisodeRecord play_episode(const NonstationaryEnv& env, const MdpSnapshot& snap, int m, Agent& agent,
                           Rng& rng, bool record_steps = false);

/// Runs episodes [first, last] restarting `agent` at every epoch start of
/// `plan` (plan episode numbering is relative to `first`). Agents using
/// local budgets receive them from the oracle at each restart.
void run_episodes(const NonstationaryEnv& env, Agent& agent, const EpochPlan& plan, int first,
                  Rng& rng, const RunOptions& opts, RunTrace& trace, int epoch_offset = 0);

/// Full run over all M episodes of `env`.
RunTrace run_restart(const NonstationaryEnv& env, Agent& agent, const EpochPlan& plan, Rng& rng,
                     const RunOptions& opts = {});

}  // namespace nsrl
