#include "nsrl/runner.hpp"

#include "nsrl/oracle.hpp"

namespace nsrl {

EpisodeRecord play_episode(const NonstationaryEnv& env, const MdpSnapshot& snap, int m, Agent& agent,
                           Rng& rng, bool record_steps) {
    EpisodeRecord rec;
    rec.episode = m;
    int s = env.initial_state(m);
    rec.initial_state = s;
    for (int h = 0; h < env.H(); ++h) {
        const int a = agent.act(h, s, rng);
        const StepOutcome out = env.step(snap, m, h, s, a, rng);
        agent.observe(h, s, a, out.reward, out.next_state);
        rec.reward += out.reward;
        if (record_steps) {
            rec.sales.push_back(out.sales);
            rec.next_states.push_back(out.next_state);
        }
        s = out.next_state;
    }
    return rec;
}

void run_episodes(const NonstationaryEnv& env, Agent& agent, const EpochPlan& plan, int first,
                  Rng& rng, const RunOptions& opts, RunTrace& trace, int epoch_offset) {
    const int count = plan.M();
    require(first >= 1 && first + count - 1 <= env.M(), "run_episodes: range exceeds M");
    for (int k = 1; k <= count; ++k) {
        const int m = first + k - 1;
        const int epoch = plan.epoch_of(k);
        if (plan.is_restart(k)) {
            agent.restart();
            if (agent.wants_local_budget()) {
                const int lo = first + plan.first(epoch) - 1;
                const int hi = first + plan.last(epoch) - 1;
                const BudgetReport rep = variation_budgets(env, lo, hi);
                agent.set_local_budget(rep.delta_r + env.H() * rep.delta_p);
            }
        }
        if (opts.on_episode_start) opts.on_episode_start(m, agent);
        if (opts.record_policy) trace.policies.push_back(agent.greedy_policy());
        const auto snap = env.snapshot(m);
        EpisodeRecord rec = play_episode(env, *snap, m, agent, rng, opts.record_steps);
        rec.epoch = epoch_offset + epoch + 1;
        trace.append(std::move(rec));
    }
}

RunTrace run_restart(const NonstationaryEnv& env, Agent& agent, const EpochPlan& plan, Rng& rng,
                     const RunOptions& opts) {
    require(plan.M() == env.M(), "run_restart: plan does not cover the env");
    RunTrace trace;
    trace.agent = agent.name();
    trace.env = env.name();
    trace.episodes.reserve(static_cast<std::size_t>(env.M()));
    run_episodes(env, agent, plan, 1, rng, opts, trace);
    return trace;
}

}  // namespace nsrl
