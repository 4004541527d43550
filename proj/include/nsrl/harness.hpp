#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsrl/agents.hpp"
#include "nsrl/envs.hpp"
#include "nsrl/inventory.hpp"
#include "nsrl/meta_bandit.hpp"
#include "nsrl/multiagent.hpp"
#include "nsrl/oracle.hpp"

namespace nsrl {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kTraceSchema = "# nsrl-trace v1";
inline constexpr const char* kAggregateSchema = "# nsrl-aggregate v1";

/// Thrown for malformed experiment configs; the message names the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TeamScenario {
    int S = 2, A1 = 2, A2 = 2;
    std::uint64_t seed = 0;
    int opponent_period = 100;
};

struct EnvConfig {
    std::string kind = "lock";  // lock | jao | inventory | team
    LockConfig lock;
    JaoChainConfig jao;
    InventoryParams inventory;
    TeamScenario team;
};

struct AgentConfig {
    std::string kind = "restart_q_ucb";  // restart_q_ucb | q_ucb | epsilon_greedy | double_restart
    BonusKind bonus = BonusKind::Hoeffding;
    BudgetMode budgets = BudgetMode::None;
    double delta = 0.1;
    std::optional<double> agent_delta;  // double_restart inner learner
    std::optional<int> epochs;
    std::optional<int> epoch_length;
    std::optional<double> variation_budget;
    double epsilon = 0.05;
    bool optimistic_init = false;  // epsilon_greedy only
    std::optional<double> ref_threshold;
};

struct ExperimentConfig {
    std::string name = "experiment";
    int M = 5000;
    int H = 5;
    EnvConfig env;
    AgentConfig agent;
    int seeds = 30;
    std::uint64_t base_seed = 1;
    std::string output = "out";
    bool record_policy = false;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct TeamSetup {
    TeamModel team;
    OpponentSchedule schedule;
};

/// Team model and opponent schedule of a "team" env config.
TeamSetup build_team(const ExperimentConfig& cfg);

NonstationaryEnv build_env(const ExperimentConfig& cfg);
std::unique_ptr<Agent> make_agent(const AgentConfig& agent, const NonstationaryEnv& env);
/// Restart schedule for restart-style agents (D = 1 for q_ucb).
EpochPlan epoch_plan(const AgentConfig& agent, const NonstationaryEnv& env);

struct SeedResult {
    int run_id = 0;
    RunTrace trace;
    std::optional<RegretSeries> regret;
};

/// One seeded run. Deterministic in (cfg, seed).
SeedResult run_seed(const ExperimentConfig& cfg, const NonstationaryEnv& env, int run_id,
                    std::uint64_t seed, const RunOptions& extra = {});

struct AggregateStats {
    std::vector<double> mean_cum_reward, std_cum_reward;
    std::vector<double> mean_cum_regret, std_cum_regret;  // empty without regret
};

/// Per-episode mean and population std across runs.
AggregateStats aggregate(const std::vector<SeedResult>& runs);

struct ExperimentResult {
    std::vector<SeedResult> runs;
    AggregateStats stats;
    std::vector<std::filesystem::path> files;
};

/// Worker count from NSRL_WORKERS, else hardware concurrency.
int worker_count();

/// Runs every seed (in parallel), aggregates, and writes one trace CSV per
/// seed plus aggregate.csv and meta.json under cfg.output when `write` is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write = true,
                                const RunOptions& extra = {});

void write_trace_csv(const std::filesystem::path& path, const SeedResult& run, bool audit_columns);
void write_aggregate_csv(const std::filesystem::path& path, const AggregateStats& stats);

/// Shortest round-trip decimal representation.
std::string format_number(double x);

struct TraceRow {
    int run_id = 0;
    std::uint64_t seed = 0;
    int episode = 0;
    double episode_reward = 0.0;
    double cumulative_reward = 0.0;
    std::optional<double> cumulative_regret;
    int epoch = 0;
    std::optional<int> arm;
};

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

}  // namespace nsrl
