#include <cstdio>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "nsrl/harness.hpp"

using namespace nsrl;

namespace {

struct RunArgs {
    std::string config;
    std::optional<int> seeds;
    std::optional<std::string> out;
    bool record_policy = false;
    std::optional<int> workers;
};

void apply(ExperimentConfig& cfg, const RunArgs& args) {
    if (args.seeds) cfg.seeds = *args.seeds;
    if (args.out) cfg.output = *args.out;
    if (args.record_policy) cfg.record_policy = true;
    if (args.workers) setenv("NSRL_WORKERS", std::to_string(*args.workers).c_str(), 1);
}

int cmd_run(const RunArgs& args) {
    ExperimentConfig cfg = load_config(args.config);
    apply(cfg, args);
    const auto res = run_experiment(cfg);
    const auto& st = res.stats;
    std::printf("%s: %d seeds, M=%d, H=%d\n", cfg.name.c_str(), cfg.seeds, cfg.M, cfg.H);
    std::printf("final cumulative reward  mean %.6g  std %.6g\n", st.mean_cum_reward.back(),
                st.std_cum_reward.back());
    if (!st.mean_cum_regret.empty())
        std::printf("final cumulative regret  mean %.6g  std %.6g\n", st.mean_cum_regret.back(),
                    st.std_cum_regret.back());
    std::printf("wrote %zu files under %s\n", res.files.size(), cfg.output.c_str());
    return 0;
}

int cmd_budgets(const RunArgs& args) {
    ExperimentConfig cfg = load_config(args.config);
    apply(cfg, args);
    const auto env = build_env(cfg);
    const EpochPlan plan = cfg.agent.kind == "double_restart" ? EpochPlan::single(env.M())
                                                               : epoch_plan(cfg.agent, env);
    const auto rep = variation_budgets(env, 1, env.M(), &plan);
    std::printf("env %s  S=%d A=%d H=%d M=%d\n", env.name().c_str(), env.S(), env.A(), env.H(), env.M());
    std::printf("delta_r %.10g\ndelta_p %.10g\ntotal %.10g\n", rep.delta_r, rep.delta_p, rep.total());
    for (std::size_t h = 0; h < rep.per_step_r.size(); ++h)
        std::printf("step %zu  r %.10g  p %.10g\n", h + 1, rep.per_step_r[h], rep.per_step_p[h]);
    std::printf("epochs %d  epoch_length %d\n", plan.epochs(), plan.K());
    for (std::size_t d = 0; d < rep.locals.size(); ++d) {
        const auto& l = rep.locals[d];
        std::printf("epoch %zu  [%d, %d]  delta_r %.10g  delta_p %.10g\n", d + 1, l.first, l.last, l.delta_r,
                    l.delta_p);
    }
    if (cfg.env.kind == "team")
        std::printf("switching_cost %lld\n", static_cast<long long>(switching_cost(build_team(cfg).schedule)));
    return 0;
}

int cmd_regret(const RunArgs& args, const std::string& trace) {
    if (!trace.empty()) {
        const auto rows = read_trace_csv(trace);
        if (rows.empty()) throw std::runtime_error(trace + ": no rows");
        if (!rows.back().cumulative_regret)
            throw std::runtime_error(trace + ": no regret column; rerun with --record-policy");
        std::printf("episodes %zu\ncumulative_reward %.10g\ncumulative_regret %.10g\n", rows.size(),
                    rows.back().cumulative_reward, *rows.back().cumulative_regret);
        return 0;
    }
    ExperimentConfig cfg = load_config(args.config);
    apply(cfg, args);
    cfg.record_policy = true;
    const auto res = run_experiment(cfg, false);
    std::printf("%-8s %-14s %-14s\n", "run", "cum_reward", "cum_regret");
    for (const auto& r : res.runs)
        std::printf("%-8d %-14.8g %-14.8g\n", r.run_id, r.trace.episodes.back().cumulative_reward,
                    r.regret->total());
    std::printf("mean regret %.8g  std %.8g\n", res.stats.mean_cum_regret.back(), res.stats.std_cum_regret.back());
    return 0;
}

void add_common(CLI::App* app, RunArgs& args, bool config_required) {
    auto* opt = app->add_option("-c,--config", args.config, "Experiment config (JSON)");
    if (config_required) opt->required();
    opt->check(CLI::ExistingFile);
    app->add_option("--seeds", args.seeds, "Override the number of seeds")->check(CLI::PositiveNumber);
    app->add_option("--workers", args.workers, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular non-stationary RL harness"};
    app.set_version_flag("--version", std::string("nsrl ") + kVersion);
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run all seeds of a config and write trace CSVs");
    add_common(run, run_args, true);
    run->add_option("-o,--out", run_args.out, "Output directory");
    run->add_flag("--record-policy", run_args.record_policy, "Record per-episode policies and exact regret");

    auto* oracle = app.add_subcommand("oracle", "Exact oracle queries");
    oracle->require_subcommand(1);
    RunArgs budget_args;
    auto* budgets = oracle->add_subcommand("budgets", "Variation budgets and per-epoch local budgets");
    add_common(budgets, budget_args, true);
    RunArgs regret_args;
    std::string trace;
    auto* regret = oracle->add_subcommand("regret", "Exact dynamic regret of a config or a trace summary");
    add_common(regret, regret_args, false);
    regret->add_option("--trace", trace, "Summarize an existing trace CSV")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(run_args);
        if (budgets->parsed()) return cmd_budgets(budget_args);
        if (regret->parsed()) {
            if (trace.empty() && regret_args.config.empty()) {
                std::cerr << "oracle regret: give --config or --trace\n";
                return 2;
            }
            return cmd_regret(regret_args, trace);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
