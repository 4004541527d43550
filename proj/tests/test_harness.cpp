#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsrl/harness.hpp"

using namespace nsrl;
using nlohmann::json;

namespace {

json small_lock(int M = 60) {
    return json{{"name", "t"},
                {"M", M},
                {"H", 3},
                {"seeds", 2},
                {"env", {{"kind", "lock"}, {"variation", "abrupt"}, {"period", 20}}},
                {"agent", {{"kind", "restart_q_ucb"}, {"delta", 1.9}, {"epoch_length", 20}}}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nsrl_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

SeedResult fake_run(std::vector<double> rewards) {
    SeedResult r;
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        EpisodeRecord rec;
        rec.episode = static_cast<int>(i) + 1;
        rec.reward = rewards[i];
        r.trace.append(rec);
    }
    return r;
}

}  // namespace

TEST(Config, UnknownKeyIsNamed) {
    auto j = small_lock();
    j["agent"]["detla"] = 0.1;
    try {
        parse_config(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("detla"), std::string::npos);
    }
}

TEST(Config, RejectsBadValues) {
    auto j = small_lock();
    j["agent"]["delta"] = 2.5;
    EXPECT_THROW(parse_config(j), ConfigError);
    j = small_lock();
    j["agent"]["epochs"] = 3;
    EXPECT_THROW(parse_config(j), ConfigError);
    j = small_lock();
    j["env"]["kind"] = "maze";
    EXPECT_THROW(parse_config(j), ConfigError);
    j = small_lock();
    j["M"] = "many";
    EXPECT_THROW(parse_config(j), ConfigError);
    j = small_lock();
    j["env"] = {{"kind", "inventory"}, {"capacity", 3}, {"demand", {{"type", "constant"}, {"pmf", {0.5, 0.4}}}}};
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, MissingFileAndBadJson) {
    EXPECT_THROW(load_config("/nonexistent/cfg.json"), ConfigError);
    const auto dir = scratch("badjson");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "c.json") << "{ \"M\": ";
    EXPECT_THROW(load_config(dir / "c.json"), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
    const std::filesystem::path root = NSRL_SOURCE_DIR;
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(root / "configs")) {
        if (e.path().extension() != ".json") continue;
        const auto cfg = load_config(e.path());
        EXPECT_NO_THROW(build_env(cfg)) << e.path();
        ++n;
    }
    EXPECT_GE(n, 6);
}

TEST(Aggregate, TwoPointStatistics) {
    const auto s = aggregate({fake_run({10.0}), fake_run({14.0})});
    EXPECT_DOUBLE_EQ(s.mean_cum_reward[0], 12.0);
    EXPECT_DOUBLE_EQ(s.std_cum_reward[0], 2.0);
    EXPECT_TRUE(s.mean_cum_regret.empty());
}

TEST(Aggregate, IdenticalRunsHaveZeroStd) {
    const auto s = aggregate({fake_run({1.0, 2.0, 0.5}), fake_run({1.0, 2.0, 0.5})});
    for (double x : s.std_cum_reward) EXPECT_EQ(x, 0.0);
    EXPECT_DOUBLE_EQ(s.mean_cum_reward[2], 3.5);
}

TEST(Aggregate, MismatchedTracesThrow) {
    EXPECT_THROW(aggregate({fake_run({1.0}), fake_run({1.0, 2.0})}), ContractViolation);
}

TEST(Experiment, SingleSeedHasZeroStdColumn) {
    auto cfg = parse_config(small_lock());
    cfg.seeds = 1;
    const auto res = run_experiment(cfg, false);
    for (double x : res.stats.std_cum_reward) EXPECT_EQ(x, 0.0);
}

TEST(Experiment, WritesReproducibleFiles) {
    auto cfg = parse_config(small_lock());
    cfg.record_policy = true;
    const auto a = scratch("repro_a"), b = scratch("repro_b");
    cfg.output = a.string();
    const auto ra = run_experiment(cfg);
    cfg.output = b.string();
    run_experiment(cfg);
    for (const char* f : {"trace_0.csv", "trace_1.csv", "aggregate.csv"}) {
        ASSERT_TRUE(std::filesystem::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_TRUE(std::filesystem::exists(a / "meta.json"));
    EXPECT_EQ(slurp(a / "aggregate.csv").rfind(kAggregateSchema, 0), 0u);

    const auto rows = read_trace_csv(a / "trace_0.csv");
    ASSERT_EQ(rows.size(), 60u);
    EXPECT_EQ(rows.back().episode, 60);
    ASSERT_TRUE(rows.back().cumulative_regret.has_value());
    EXPECT_NEAR(*rows.back().cumulative_regret, ra.runs[0].regret->total(), 1e-9);
    EXPECT_NEAR(rows.back().cumulative_reward, ra.runs[0].trace.episodes.back().cumulative_reward, 1e-9);
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
    auto cfg = parse_config(small_lock());
    cfg.seeds = 4;
    setenv("NSRL_WORKERS", "1", 1);
    const auto one = run_experiment(cfg, false);
    setenv("NSRL_WORKERS", "3", 1);
    const auto three = run_experiment(cfg, false);
    unsetenv("NSRL_WORKERS");
    EXPECT_EQ(one.stats.mean_cum_reward, three.stats.mean_cum_reward);
}

TEST(Experiment, FullLengthLockTrace) {
    auto j = small_lock(5000);
    j["H"] = 5;
    j["seeds"] = 1;
    j["env"]["period"] = 1000;
    j["agent"]["epoch_length"] = 1000;
    auto cfg = parse_config(j);
    cfg.output = scratch("full").string();
    run_experiment(cfg);
    const auto rows = read_trace_csv(std::filesystem::path(cfg.output) / "trace_0.csv");
    ASSERT_EQ(rows.size(), 5000u);
    EXPECT_EQ(rows[999].epoch, 1);
    EXPECT_EQ(rows[1000].epoch, 2);
}

TEST(Experiment, EveryAgentKindRuns) {
    for (const char* kind : {"restart_q_ucb", "q_ucb", "epsilon_greedy", "double_restart"}) {
        auto j = small_lock();
        j["agent"] = {{"kind", kind}, {"delta", 0.5}};
        auto cfg = parse_config(j);
        cfg.seeds = 1;
        const auto res = run_experiment(cfg, false);
        EXPECT_EQ(res.runs[0].trace.episodes.size(), 60u) << kind;
    }
}

TEST(Experiment, InventoryAndTeamEnvs) {
    json inv = small_lock(10);
    inv["env"] = {{"kind", "inventory"},
                  {"capacity", 3},
                  {"fixed_cost", 0.5},
                  {"lost_sales_cost", 1.0},
                  {"demand", {{"type", "constant"}, {"pmf", {0.5, 0.5}}}}};
    auto cfg = parse_config(inv);
    cfg.seeds = 1;
    cfg.output = scratch("inv").string();
    run_experiment(cfg);
    const auto header = slurp(std::filesystem::path(cfg.output) / "trace_0.csv");
    EXPECT_NE(header.find("sales,next_states"), std::string::npos);

    json team = small_lock(30);
    team["env"] = {{"kind", "team"}, {"S", 2}, {"A1", 2}, {"A2", 2}, {"opponent_period", 10}};
    cfg = parse_config(team);
    const auto env = build_env(cfg);
    EXPECT_EQ(env.M(), 30);
    EXPECT_EQ(switching_cost(build_team(cfg).schedule), 2);
}

TEST(FormatNumber, RoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 1e-17, 12345.678, 0.0}) EXPECT_EQ(std::stod(format_number(x)), x);
}
